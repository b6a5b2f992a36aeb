#pragma once

#include <memory>

#include "imgskip/operators.hpp"
#include "imgskip/solvers.hpp"
#include "imgskip/tv_prox.hpp"

namespace imgskip {

/// Dual of (Huber-)ROF denoising over q with |q(i,j)| <= alpha:
///   F(q) = 0.5 ||div q + b||^2 + 0.5 ||b||^2 + (eps / 2 alpha) ||q||^2.
/// eps = 0 gives plain ROF, which is not strongly convex.
struct DualRofProblem {
    Image b;
    double alpha = 0.0;
    double huber_eps = 0.0;
    double mu = 0.0;         // eps / alpha
    double lipschitz = 8.0;  // 8 + eps / alpha

    GridShape shape() const noexcept { return b.shape(); }
    std::size_t dual_size() const noexcept { return 2 * b.size(); }

    void gradient(ConstView q, View out) const;
    double objective(ConstView q) const;
    SmoothProblem smooth() const;
    ProxFn projector() const;
    ProxProblem prox_problem() const;
};

DualRofProblem build_dual_rof(Image b, double alpha, double huber_eps = 0.0);

/// u = b + div q.
Image primal_from_dual(const DualField& q, const Image& b);
void primal_from_dual(ConstView q, const Image& b, View u);

enum class Splitting { implicit, explicit_ };

/// min_u 0.5 ||A u - b||^2 + alpha TV(u) [+ indicator(u >= 0)].
///
/// Implicit splitting keeps TV inside g and evaluates its prox with the
/// warm-started inner solver. Explicit splitting stacks K = [A; D] so that
/// every prox is closed form.
class TvReconstructionProblem {
public:
    TvReconstructionProblem(LinearMap A, Vec b, GridShape shape, double alpha, bool nonneg,
                            Splitting splitting, int inner_budget, bool accelerated_inner = true);

    const LinearMap& A() const noexcept { return A_; }
    ConstView b() const noexcept { return *b_; }
    GridShape shape() const noexcept { return shape_; }
    double alpha() const noexcept { return alpha_; }
    bool nonneg() const noexcept { return nonneg_; }
    Splitting splitting() const noexcept { return splitting_; }
    int inner_budget() const noexcept { return inner_budget_; }

    /// ||A||^2, from the operator's cached estimate (power method if unset).
    double lipschitz() const;

    /// Gradient of 0.5 ||A u - b||^2.
    void fidelity_gradient(ConstView u, View out) const;
    double fidelity(ConstView u) const;

    /// Implicit splitting only: f = fidelity, g = alpha TV (+ nonneg) via tv_prox.
    ProxProblem prox_problem() const;
    /// Implicit: K = A, f = 0.5 ||. - b||^2, g as above.
    /// Explicit: K = [A; D], f separable over (fidelity, alpha ||.||_{2,1}),
    /// g = zero or nonneg indicator. Provides diagonal-step prox oracles.
    SaddleProblem saddle_problem() const;

    /// The inner solver state shared by every oracle built from this problem.
    TvProxState& inner_state() { return *state_; }
    const TvProxState& inner_state() const { return *state_; }
    /// Clears the warm start and counters so the next run starts cold.
    void reset_inner_state();

private:
    LinearMap A_;
    std::shared_ptr<const Vec> b_;
    GridShape shape_;
    double alpha_;
    bool nonneg_;
    Splitting splitting_;
    int inner_budget_;
    std::shared_ptr<TvProxState> state_;
};

TvReconstructionProblem build_tv_recon(LinearMap A, Vec b, GridShape shape, double alpha,
                                       bool nonneg, Splitting splitting, int inner_budget);

/// 0.5 ||A u - b||^2 + alpha TV(u); +infinity when nonnegativity is required
/// and min(u) < -1e-12.
double objective_tv(ConstView u, const TvReconstructionProblem& prob);

} // namespace imgskip
