#include "imgskip/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "imgskip/errors.hpp"

namespace imgskip {

namespace {

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ParameterError(std::string(what) + " must be positive");
}

void require_iters(long iters) {
    if (iters < 0) throw ParameterError("iteration count must be nonnegative");
}

// out = x - gamma * g
void gradient_step(ConstView x, double gamma, ConstView g, View out) {
    for (std::size_t k = 0; k < x.size(); ++k) out[k] = x[k] - gamma * g[k];
}

void check_step_rule(double sigma, double tau, double norm_K_sq, const char* algorithm) {
    require_positive(sigma, "sigma");
    require_positive(tau, "tau");
    if (sigma * tau * norm_K_sq > 1.0 + 1e-12)
        throw ParameterError(std::string(algorithm) + ": step rule sigma*tau*||K||^2 <= 1 violated (" +
                             std::to_string(sigma * tau * norm_K_sq) + ")");
}

} // namespace

void SmoothProblem::validate() const {
    if (!grad) throw ParameterError("SmoothProblem: gradient oracle missing");
    if (!(lipschitz > 0.0)) throw ParameterError("SmoothProblem: lipschitz must be positive");
    if (!(strong_convexity >= 0.0) || strong_convexity > lipschitz)
        throw ParameterError("SmoothProblem: need lipschitz >= strong_convexity >= 0");
}

void IterationLog::append(const RunRecord& record) {
    if (!records_.empty()) {
        const RunRecord& last = records_.back();
        if (record.iter <= last.iter) throw ParameterError("IterationLog: iterations must increase");
        if (record.prox_count < last.prox_count || record.inner_iter_count < last.inner_iter_count)
            throw ParameterError("IterationLog: counters must not decrease");
    }
    records_.push_back(record);
}

RunTracker::RunTracker(std::string algorithm, const Monitor& monitor, const CounterFn& inner,
                       long expected_iters)
    : algorithm_(std::move(algorithm)),
      monitor_(monitor),
      inner_(inner),
      start_(std::chrono::steady_clock::now()) {
    log_.reserve(static_cast<std::size_t>(std::max(0L, expected_iters)));
}

bool RunTracker::step(long iter, bool prox_applied, ConstView x) {
    if (!all_finite(x)) throw DivergenceError(algorithm_, iter);
    if (prox_applied) ++prox_count_;
    RunRecord record;
    record.iter = iter;
    record.elapsed_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    record.prox_count = prox_count_;
    record.inner_iter_count = inner_ ? inner_() : 0;
    record.prox_applied = prox_applied;
    const bool stop = monitor_ ? monitor_(record, x) : false;
    log_.append(record);
    return stop;
}

SolverResult run_gd(const SmoothProblem& p, Vec x0, double gamma, long iters,
                    const Monitor& monitor) {
    p.validate();
    require_positive(gamma, "gamma");
    require_iters(iters);
    const CounterFn no_counter;
    RunTracker tracker("gd", monitor, no_counter, iters);
    SolverResult result;
    Vec x = std::move(x0);
    Vec g(x.size());
    for (long k = 1; k <= iters; ++k) {
        p.grad(x, g);
        gradient_step(x, gamma, g, x);
        result.iterations = k;
        if (tracker.step(k, false, x)) {
            result.stopped_early = k < iters;
            break;
        }
    }
    result.x = std::move(x);
    result.log = tracker.take_log();
    return result;
}

SolverResult run_pgd(const ProxProblem& p, Vec x0, double gamma, long iters,
                     const Monitor& monitor) {
    p.smooth.validate();
    require_positive(gamma, "gamma");
    require_iters(iters);
    if (!p.prox_g) throw ParameterError("run_pgd: prox_g missing");
    if (gamma >= 2.0 / p.smooth.lipschitz)
        std::cerr << "warning: pgd step " << gamma << " >= 2/L = " << 2.0 / p.smooth.lipschitz
                  << "\n";
    RunTracker tracker("pgd", monitor, p.inner_iterations, iters);
    SolverResult result;
    Vec x = std::move(x0);
    Vec g(x.size());
    Vec v(x.size());
    for (long k = 1; k <= iters; ++k) {
        p.smooth.grad(x, g);
        gradient_step(x, gamma, g, v);
        p.prox_g(v, gamma, x);
        result.iterations = k;
        if (tracker.step(k, true, x)) {
            result.stopped_early = k < iters;
            break;
        }
    }
    result.x = std::move(x);
    result.log = tracker.take_log();
    return result;
}

SolverResult run_fista(const ProxProblem& p, Vec x0, double gamma, long iters,
                       const Monitor& monitor) {
    p.smooth.validate();
    require_positive(gamma, "gamma");
    require_iters(iters);
    if (!p.prox_g) throw ParameterError("run_fista: prox_g missing");
    RunTracker tracker("fista", monitor, p.inner_iterations, iters);
    SolverResult result;
    Vec x = std::move(x0);
    Vec x_prev = x;
    Vec xbar(x.size());
    Vec g(x.size());
    Vec v(x.size());
    double t = 1.0;
    for (long k = 1; k <= iters; ++k) {
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const double a = (t - 1.0) / t_next;
        for (std::size_t i = 0; i < x.size(); ++i) xbar[i] = x[i] + a * (x[i] - x_prev[i]);
        t = t_next;
        p.smooth.grad(xbar, g);
        gradient_step(xbar, gamma, g, v);
        x_prev.swap(x);
        p.prox_g(v, gamma, x);
        result.iterations = k;
        if (tracker.step(k, true, x)) {
            result.stopped_early = k < iters;
            break;
        }
    }
    result.x = std::move(x);
    result.log = tracker.take_log();
    return result;
}

SolverResult run_aprojgd(const SmoothProblem& p, const ProxFn& projector, Vec x0, double gamma,
                         long iters, const Monitor& monitor) {
    ProxProblem problem{p, projector, {}, {}};
    return run_fista(problem, std::move(x0), gamma, iters, monitor);
}

SolverResult run_pdhg(const SaddleProblem& p, Vec x0, Vec y0, double sigma, double tau,
                      long iters, const Monitor& monitor) {
    check_step_rule(sigma, tau, p.norm_K_sq, "pdhg");
    require_iters(iters);
    const LinearMap& K = p.K;
    if (x0.size() != K.domain_size() || y0.size() != K.range_size())
        throw ShapeError("run_pdhg: initial point does not match K");
    RunTracker tracker("pdhg", monitor, p.inner_iterations, iters);
    SolverResult result;
    Vec x = std::move(x0);
    Vec y = std::move(y0);
    Vec x_prev(x.size());
    Vec kty(x.size());
    Vec v(x.size());
    Vec kx(y.size());
    Vec w(y.size());
    for (long k = 1; k <= iters; ++k) {
        K.apply_adjoint(y, kty);
        gradient_step(x, sigma, kty, v);
        x_prev.swap(x);
        p.prox_g(v, sigma, x);
        for (std::size_t i = 0; i < x.size(); ++i) v[i] = 2.0 * x[i] - x_prev[i];
        K.apply(v, kx);
        for (std::size_t j = 0; j < y.size(); ++j) w[j] = y[j] + tau * kx[j];
        p.prox_fstar(w, tau, y);
        result.iterations = k;
        if (!all_finite(y)) throw DivergenceError("pdhg", k);
        if (tracker.step(k, true, x)) {
            result.stopped_early = k < iters;
            break;
        }
    }
    result.x = std::move(x);
    result.y = std::move(y);
    result.log = tracker.take_log();
    return result;
}

DiagonalSteps diagonal_steps(const LinearMap& K) {
    constexpr double floor = 1e-12;
    DiagonalSteps steps{K.abs_col_sums(), K.abs_row_sums()};
    for (double& s : steps.primal) s = 1.0 / std::max(s, floor);
    for (double& s : steps.dual) s = 1.0 / std::max(s, floor);
    return steps;
}

SolverResult run_pdhg_preconditioned(const SaddleProblem& p, long iters, const Monitor& monitor,
                                     Vec x0, Vec y0) {
    require_iters(iters);
    if (!p.prox_fstar_diag || !p.prox_g_diag)
        throw ParameterError("run_pdhg_preconditioned: diagonal-step prox oracles required");
    const LinearMap& K = p.K;
    if (x0.empty()) x0.assign(K.domain_size(), 0.0);
    if (y0.empty()) y0.assign(K.range_size(), 0.0);
    if (x0.size() != K.domain_size() || y0.size() != K.range_size())
        throw ShapeError("run_pdhg_preconditioned: initial point does not match K");
    const DiagonalSteps steps = diagonal_steps(K);
    RunTracker tracker("pdhg_preconditioned", monitor, p.inner_iterations, iters);
    SolverResult result;
    Vec x = std::move(x0);
    Vec y = std::move(y0);
    Vec x_prev(x.size());
    Vec kty(x.size());
    Vec v(x.size());
    Vec kx(y.size());
    Vec w(y.size());
    for (long k = 1; k <= iters; ++k) {
        K.apply_adjoint(y, kty);
        for (std::size_t i = 0; i < x.size(); ++i) v[i] = x[i] - steps.primal[i] * kty[i];
        x_prev.swap(x);
        p.prox_g_diag(v, steps.primal, x);
        for (std::size_t i = 0; i < x.size(); ++i) v[i] = 2.0 * x[i] - x_prev[i];
        K.apply(v, kx);
        for (std::size_t j = 0; j < y.size(); ++j) w[j] = y[j] + steps.dual[j] * kx[j];
        p.prox_fstar_diag(w, steps.dual, y);
        result.iterations = k;
        if (!all_finite(y)) throw DivergenceError("pdhg_preconditioned", k);
        if (tracker.step(k, true, x)) {
            result.stopped_early = k < iters;
            break;
        }
    }
    result.x = std::move(x);
    result.y = std::move(y);
    result.log = tracker.take_log();
    return result;
}

} // namespace imgskip
