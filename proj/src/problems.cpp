#include "imgskip/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "imgskip/errors.hpp"
#include "imgskip/proximal.hpp"

namespace imgskip {

void DualRofProblem::gradient(ConstView q, View out) const {
    const std::size_t n = b.size();
    if (q.size() != 2 * n || out.size() != 2 * n) throw ShapeError("DualRofProblem: size mismatch");
    Vec u(n);
    primal_from_dual(q, b, u);
    apply_gradient(u, shape(), out);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = mu * q[k] - out[k];
}

double DualRofProblem::objective(ConstView q) const {
    Vec u(b.size());
    primal_from_dual(q, b, u);
    const double nu = norm2(u), nb = norm2(b.flat()), nq = norm2(q);
    return 0.5 * nu * nu + 0.5 * nb * nb + 0.5 * mu * nq * nq;
}

SmoothProblem DualRofProblem::smooth() const {
    // The oracles keep their own copy so the problem object may go away.
    auto self = std::make_shared<const DualRofProblem>(*this);
    SmoothProblem p;
    p.grad = [self](ConstView q, View g) { self->gradient(q, g); };
    p.objective = [self](ConstView q) { return self->objective(q); };
    p.lipschitz = lipschitz;
    p.strong_convexity = mu;
    return p;
}

ProxFn DualRofProblem::projector() const { return make_project_ball(alpha); }

ProxProblem DualRofProblem::prox_problem() const {
    ProxProblem p;
    p.smooth = smooth();
    p.prox_g = projector();
    return p;
}

DualRofProblem build_dual_rof(Image b, double alpha, double huber_eps) {
    if (!(alpha > 0.0)) throw ParameterError("build_dual_rof: alpha must be positive");
    if (!(huber_eps >= 0.0)) throw ParameterError("build_dual_rof: huber_eps must be nonnegative");
    DualRofProblem p;
    p.b = std::move(b);
    p.alpha = alpha;
    p.huber_eps = huber_eps;
    p.mu = huber_eps / alpha;
    p.lipschitz = 8.0 + p.mu;
    return p;
}

void primal_from_dual(ConstView q, const Image& b, View u) {
    if (q.size() != 2 * b.size() || u.size() != b.size())
        throw ShapeError("primal_from_dual: shape mismatch");
    apply_divergence(q, b.shape(), u);
    add_scaled(u, 1.0, b.flat());
}

Image primal_from_dual(const DualField& q, const Image& b) {
    if (q.shape() != b.shape()) throw ShapeError("primal_from_dual: shape mismatch");
    Image u(b.shape());
    primal_from_dual(q.flat(), b, u.flat());
    return u;
}

TvReconstructionProblem::TvReconstructionProblem(LinearMap A, Vec b, GridShape shape,
                                                 double alpha, bool nonneg, Splitting splitting,
                                                 int inner_budget, bool accelerated_inner)
    : A_(std::move(A)),
      b_(std::make_shared<const Vec>(std::move(b))),
      shape_(shape),
      alpha_(alpha),
      nonneg_(nonneg),
      splitting_(splitting),
      inner_budget_(inner_budget),
      state_(std::make_shared<TvProxState>(shape, std::max(inner_budget, 1), accelerated_inner,
                                           nonneg)) {
    if (!(alpha > 0.0)) throw ParameterError("build_tv_recon: alpha must be positive");
    if (splitting == Splitting::implicit && inner_budget < 1)
        throw ParameterError("build_tv_recon: implicit splitting needs inner_budget >= 1");
    if (A_.domain_size() != shape.size())
        throw ShapeError("build_tv_recon: operator domain does not match the image grid");
    if (A_.range_size() != b_->size())
        throw ShapeError("build_tv_recon: data does not match the operator range");
}

double TvReconstructionProblem::lipschitz() const { return A_.norm_sq(); }

void TvReconstructionProblem::fidelity_gradient(ConstView u, View out) const {
    Vec r = A_.forward(u);
    add_scaled(r, -1.0, *b_);
    A_.apply_adjoint(r, out);
}

double TvReconstructionProblem::fidelity(ConstView u) const {
    Vec r = A_.forward(u);
    add_scaled(r, -1.0, *b_);
    const double nr = norm2(r);
    return 0.5 * nr * nr;
}

ProxProblem TvReconstructionProblem::prox_problem() const {
    if (splitting_ != Splitting::implicit)
        throw ParameterError("prox_problem: only the implicit splitting has a TV prox");
    const auto A = A_;
    const auto b = b_;
    const auto state = state_;
    const double alpha = alpha_;
    const bool nonneg = nonneg_;
    const GridShape shape = shape_;

    ProxProblem p;
    p.smooth.grad = [A, b](ConstView u, View g) {
        Vec r = A.forward(u);
        add_scaled(r, -1.0, *b);
        A.apply_adjoint(r, g);
    };
    p.smooth.objective = [A, b](ConstView u) {
        Vec r = A.forward(u);
        add_scaled(r, -1.0, *b);
        const double nr = norm2(r);
        return 0.5 * nr * nr;
    };
    p.smooth.lipschitz = lipschitz();
    p.prox_g = [state, alpha](ConstView x, double step, View out) {
        tv_prox(x, step * alpha, *state, out);
    };
    p.g_value = [alpha, nonneg, shape](ConstView u) {
        if (nonneg && *std::min_element(u.begin(), u.end()) < -1e-12)
            return std::numeric_limits<double>::infinity();
        return alpha * tv_value(u, shape);
    };
    p.inner_iterations = [state] { return state->total_inner_iterations; };
    return p;
}

SaddleProblem TvReconstructionProblem::saddle_problem() const {
    const auto b = b_;
    const double alpha = alpha_;

    if (splitting_ == Splitting::implicit) {
        const auto state = state_;
        SaddleProblem p{A_, {}, {}, 0.0, {}, {}, {}};
        p.prox_fstar = [b](ConstView y, double tau, View out) {
            if (tau == 0.0) return copy(y, out);
            const double inv = 1.0 / (1.0 + tau);
            for (std::size_t k = 0; k < y.size(); ++k) out[k] = (y[k] - tau * (*b)[k]) * inv;
        };
        p.prox_g = [state, alpha](ConstView x, double step, View out) {
            tv_prox(x, step * alpha, *state, out);
        };
        p.norm_K_sq = A_.norm_sq();
        p.inner_iterations = [state] { return state->total_inner_iterations; };
        return p;
    }

    LinearMap K = block_stack(A_, gradient_map(shape_));
    const std::size_t na = A_.range_size();
    SaddleProblem p{K, {}, {}, K.norm_sq(), {}, {}, {}};
    p.prox_fstar = [b, alpha, na](ConstView y, double tau, View out) {
        const double inv = 1.0 / (1.0 + tau);
        for (std::size_t k = 0; k < na; ++k) out[k] = (y[k] - tau * (*b)[k]) * inv;
        project_ball(y.subspan(na), alpha, out.subspan(na));
    };
    p.prox_fstar_diag = [b, alpha, na](ConstView y, ConstView steps, View out) {
        for (std::size_t k = 0; k < na; ++k)
            out[k] = (y[k] - steps[k] * (*b)[k]) / (1.0 + steps[k]);
        project_ball(y.subspan(na), alpha, out.subspan(na));
    };
    if (nonneg_) {
        p.prox_g = make_prox_nonneg();
        p.prox_g_diag = [](ConstView x, ConstView, View out) { project_nonneg(x, out); };
    } else {
        p.prox_g = make_prox_zero();
        p.prox_g_diag = [](ConstView x, ConstView, View out) { copy(x, out); };
    }
    return p;
}

void TvReconstructionProblem::reset_inner_state() {
    fill(state_->q_warm.flat(), 0.0);
    state_->total_inner_iterations = 0;
    state_->calls = 0;
}

TvReconstructionProblem build_tv_recon(LinearMap A, Vec b, GridShape shape, double alpha,
                                       bool nonneg, Splitting splitting, int inner_budget) {
    return TvReconstructionProblem(std::move(A), std::move(b), shape, alpha, nonneg, splitting,
                                   inner_budget);
}

double objective_tv(ConstView u, const TvReconstructionProblem& prob) {
    if (u.size() != prob.shape().size()) throw ShapeError("objective_tv: shape mismatch");
    if (prob.nonneg() && *std::min_element(u.begin(), u.end()) < -1e-12)
        return std::numeric_limits<double>::infinity();
    return prob.fidelity(u) + prob.alpha() * tv_value(u, prob.shape());
}

} // namespace imgskip
