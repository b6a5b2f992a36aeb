#include "imgskip/skip.hpp"

#include <cmath>

#include "imgskip/errors.hpp"

namespace imgskip {

namespace {

std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

void require_probability(double p) {
    if (!(p > 0.0 && p <= 1.0)) throw ParameterError("probability p must lie in (0, 1]");
}

} // namespace

BernoulliStream::BernoulliStream(double p, std::uint64_t seed) : p_(p), seed_(seed) {
    require_probability(p);
}

double BernoulliStream::uniform(std::uint64_t seed, std::uint64_t k) noexcept {
    const std::uint64_t bits = splitmix64(splitmix64(seed) ^ splitmix64(k + 0x632be59bd9b4e019ULL));
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

bool BernoulliStream::draw() { return uniform(seed_, counter_++) < p_; }

void SkipConfig::validate() const { require_probability(p); }

double optimal_probability(double mu, double L) {
    if (!(mu > 0.0) || !(L > 0.0)) throw ParameterError("optimal_probability: mu and L must be positive");
    if (mu > L) throw ParameterError("optimal_probability: mu must not exceed L");
    return std::sqrt(mu / L);
}

Vec bernoulli_op(ConstView x, double p, bool draw) {
    require_probability(p);
    Vec out(x.size(), 0.0);
    if (draw)
        for (std::size_t k = 0; k < x.size(); ++k) out[k] = x[k] / p;
    return out;
}

SolverResult run_proxskip(const ProxProblem& p, Vec x0, Vec h0, double gamma,
                          const SkipConfig& skip, long iters, const Monitor& monitor) {
    p.smooth.validate();
    skip.validate();
    if (!(gamma > 0.0)) throw ParameterError("gamma must be positive");
    if (iters < 0) throw ParameterError("iteration count must be nonnegative");
    if (!p.prox_g) throw ParameterError("run_proxskip: prox_g missing");
    Vec x = std::move(x0);
    Vec h = h0.empty() ? Vec(x.size(), 0.0) : std::move(h0);
    if (h.size() != x.size()) throw ShapeError("run_proxskip: h0 does not match x0");

    const double prob = skip.p;
    const double prox_step = gamma / prob;
    // xh - (gamma/p) h = (x - gamma grad) + gamma (1 - 1/p) h; the coefficient
    // is exactly zero at p = 1, where the step reduces to proximal gradient.
    const double h_coeff = gamma * (1.0 - 1.0 / prob);
    const double h_gain = prob / gamma;

    BernoulliStream stream = skip.stream();
    RunTracker tracker("proxskip", monitor, p.inner_iterations, iters);
    SolverResult result;
    Vec g(x.size());
    Vec base(x.size());  // x - gamma grad f(x)
    Vec xhat(x.size());
    Vec v(x.size());
    for (long k = 1; k <= iters; ++k) {
        p.smooth.grad(x, g);
        for (std::size_t i = 0; i < x.size(); ++i) {
            base[i] = x[i] - gamma * g[i];
            xhat[i] = base[i] + gamma * h[i];
        }
        const bool theta = stream.draw();
        if (theta) {
            if (h_coeff != 0.0) {
                for (std::size_t i = 0; i < x.size(); ++i) v[i] = base[i] + h_coeff * h[i];
                p.prox_g(v, prox_step, x);
            } else {
                p.prox_g(base, prox_step, x);
            }
            for (std::size_t i = 0; i < x.size(); ++i) h[i] += h_gain * (x[i] - xhat[i]);
        } else {
            // x+ = xh, so h is unchanged.
            x.swap(xhat);
        }
        result.iterations = k;
        if (tracker.step(k, theta, x)) {
            result.stopped_early = k < iters;
            break;
        }
    }
    result.x = std::move(x);
    result.h = std::move(h);
    result.log = tracker.take_log();
    return result;
}

SolverResult run_pdhgskip1(const SaddleProblem& p, Vec x0, Vec y0, double sigma, double tau,
                           double omega, const SkipConfig& skip, long iters,
                           const Monitor& monitor) {
    skip.validate();
    if (!(sigma > 0.0) || !(tau > 0.0)) throw ParameterError("sigma and tau must be positive");
    if (!(omega >= 0.0)) throw ParameterError("omega must be nonnegative");
    if (iters < 0) throw ParameterError("iteration count must be nonnegative");
    const LinearMap& K = p.K;
    if (x0.size() != K.domain_size() || y0.size() != K.range_size())
        throw ShapeError("run_pdhgskip1: initial point does not match K");

    BernoulliStream stream = skip.stream();
    RunTracker tracker("pdhgskip1", monitor, p.inner_iterations, iters);
    SolverResult result;
    Vec x = std::move(x0);
    Vec y = std::move(y0);
    Vec kty(x.size());
    Vec v(x.size());
    Vec xhat(x.size());
    Vec kx(y.size());
    Vec w(y.size());
    const double relax = 1.0 / (1.0 + omega);
    for (long k = 1; k <= iters; ++k) {
        const bool theta = stream.draw();
        if (theta) {
            K.apply_adjoint(y, kty);
            for (std::size_t i = 0; i < x.size(); ++i) v[i] = x[i] - sigma * kty[i];
            p.prox_g(v, sigma, xhat);
            for (std::size_t i = 0; i < x.size(); ++i) {
                xhat[i] = (xhat[i] - x[i]) / skip.p;
                x[i] += relax * xhat[i];
                v[i] = x[i] + xhat[i];
            }
            K.apply(v, kx);
        } else {
            // xh = 0: x stays put and the dual step sees K x.
            K.apply(x, kx);
        }
        for (std::size_t j = 0; j < y.size(); ++j) w[j] = y[j] + tau * kx[j];
        p.prox_fstar(w, tau, y);
        if (!all_finite(y)) throw DivergenceError("pdhgskip1", k);
        result.iterations = k;
        if (tracker.step(k, theta, x)) {
            result.stopped_early = k < iters;
            break;
        }
    }
    result.x = std::move(x);
    result.y = std::move(y);
    result.log = tracker.take_log();
    return result;
}

SolverResult run_pdhgskip2(const SaddleProblem& p, Vec x0, Vec y0, Vec h0, double sigma,
                           double tau, const SkipConfig& skip, long iters,
                           const Monitor& monitor) {
    skip.validate();
    if (!(sigma > 0.0) || !(tau > 0.0)) throw ParameterError("sigma and tau must be positive");
    if (sigma * tau * p.norm_K_sq > 1.0 + 1e-12)
        throw ParameterError("pdhgskip2: step rule sigma*tau*||K||^2 <= 1 violated");
    if (iters < 0) throw ParameterError("iteration count must be nonnegative");
    const LinearMap& K = p.K;
    if (x0.size() != K.domain_size() || y0.size() != K.range_size())
        throw ShapeError("run_pdhgskip2: initial point does not match K");
    Vec x = std::move(x0);
    Vec y = std::move(y0);
    Vec h = h0.empty() ? Vec(x.size(), 0.0) : std::move(h0);
    if (h.size() != x.size()) throw ShapeError("run_pdhgskip2: h0 does not match x0");

    const double prob = skip.p;
    const double prox_step = sigma / prob;
    const double h_coeff = sigma * (1.0 - 1.0 / prob);
    const double h_gain = prob / sigma;

    BernoulliStream stream = skip.stream();
    RunTracker tracker("pdhgskip2", monitor, p.inner_iterations, iters);
    SolverResult result;
    Vec x_prev(x.size());
    Vec kty(x.size());
    Vec base(x.size());  // x - sigma K^T y
    Vec xhat(x.size());
    Vec v(x.size());
    Vec kx(y.size());
    Vec w(y.size());
    for (long k = 1; k <= iters; ++k) {
        K.apply_adjoint(y, kty);
        for (std::size_t i = 0; i < x.size(); ++i) {
            base[i] = x[i] - sigma * kty[i];
            xhat[i] = base[i] + sigma * h[i];
        }
        const bool theta = stream.draw();
        x_prev.swap(x);
        if (theta) {
            if (h_coeff != 0.0) {
                for (std::size_t i = 0; i < x.size(); ++i) v[i] = base[i] + h_coeff * h[i];
                p.prox_g(v, prox_step, x);
            } else {
                p.prox_g(base, prox_step, x);
            }
            for (std::size_t i = 0; i < x.size(); ++i) h[i] += h_gain * (x[i] - xhat[i]);
        } else {
            copy(xhat, x);
        }
        for (std::size_t i = 0; i < x.size(); ++i) v[i] = 2.0 * x[i] - x_prev[i];
        K.apply(v, kx);
        for (std::size_t j = 0; j < y.size(); ++j) w[j] = y[j] + tau * kx[j];
        p.prox_fstar(w, tau, y);
        if (!all_finite(y)) throw DivergenceError("pdhgskip2", k);
        result.iterations = k;
        if (tracker.step(k, theta, x)) {
            result.stopped_early = k < iters;
            break;
        }
    }
    result.x = std::move(x);
    result.y = std::move(y);
    result.h = std::move(h);
    result.log = tracker.take_log();
    return result;
}

} // namespace imgskip
