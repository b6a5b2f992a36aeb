#pragma once

#include <cstdint>

#include "imgskip/solvers.hpp"

namespace imgskip {

/// Counter-based Bernoulli stream: draw k is a pure function of (seed, k), so
/// runs with equal seeds see the same uniforms regardless of p.
class BernoulliStream {
public:
    BernoulliStream(double p, std::uint64_t seed);

    /// Consumes one uniform and returns whether it falls below p.
    bool draw();
    /// Uniform in [0, 1) for draw index k.
    static double uniform(std::uint64_t seed, std::uint64_t k) noexcept;

    double p() const noexcept { return p_; }
    std::uint64_t draws() const noexcept { return counter_; }

private:
    double p_;
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

/// Skip probability and seed of one randomized run.
struct SkipConfig {
    double p = 1.0;
    std::uint64_t seed = 0;

    void validate() const;
    BernoulliStream stream() const { return BernoulliStream(p, seed); }
};

/// sqrt(mu / L), the smallest probability with the accelerated rate.
double optimal_probability(double mu, double L);

/// B_p(x): x / p when draw is true, zero otherwise.
Vec bernoulli_op(ConstView x, double p, bool draw);

/// ProxSkip. Per iteration:
///   xh = x - gamma (grad f(x) - h)
///   x+ = prox_{(gamma/p) g}(xh - (gamma/p) h) with probability p, else xh
///   h+ = h + (p / gamma)(x+ - xh)
/// An empty h0 starts from zero.
SolverResult run_proxskip(const ProxProblem& p, Vec x0, Vec h0, double gamma,
                          const SkipConfig& skip, long iters, const Monitor& monitor = {});

/// PDHGSkip-1 (Bernoulli-gated primal step):
///   xh = B_p(prox_{sigma g}(x - sigma K^T y) - x)
///   x+ = x + xh / (1 + omega)
///   y+ = prox_{tau f*}(y + tau K (x+ + xh))
/// On a zero draw neither K^T nor prox_g is evaluated.
SolverResult run_pdhgskip1(const SaddleProblem& p, Vec x0, Vec y0, double sigma, double tau,
                           double omega, const SkipConfig& skip, long iters,
                           const Monitor& monitor = {});

/// PDHGSkip-2 (control-variate primal step):
///   xh = x - sigma (K^T y - h)
///   x+ = prox_{(sigma/p) g}(xh - (sigma/p) h) with probability p, else xh
///   y+ = prox_{tau f*}(y + tau K (2 x+ - x))
///   h+ = h + (p / sigma)(x+ - xh)
/// An empty h0 starts from zero. Requires sigma * tau * norm_K_sq <= 1.
SolverResult run_pdhgskip2(const SaddleProblem& p, Vec x0, Vec y0, Vec h0, double sigma,
                           double tau, const SkipConfig& skip, long iters,
                           const Monitor& monitor = {});

} // namespace imgskip
