#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "imgskip/operators.hpp"
#include "imgskip/proximal.hpp"
#include "imgskip/tensor.hpp"

namespace imgskip {

using GradFn = std::function<void(ConstView x, View grad)>;
using ValueFn = std::function<double(ConstView x)>;
/// Prox with a per-entry step vector: prox_{diag(steps) g}(x).
using DiagProxFn = std::function<void(ConstView x, ConstView steps, View out)>;
using CounterFn = std::function<long()>;

/// Smooth part f: gradient oracle, Lipschitz constant L of the gradient and
/// strong convexity modulus mu.
struct SmoothProblem {
    GradFn grad;
    double lipschitz = 1.0;
    double strong_convexity = 0.0;
    ValueFn objective;  // optional

    void validate() const;
};

/// min f(x) + g(x) with g accessed through its prox.
struct ProxProblem {
    SmoothProblem smooth;
    ProxFn prox_g;
    ValueFn g_value;           // optional
    CounterFn inner_iterations;  // optional: cumulative inner work behind prox_g
};

/// min f(Kx) + g(x), accessed through prox_{f*} and prox_g.
struct SaddleProblem {
    LinearMap K;
    ProxFn prox_fstar;
    ProxFn prox_g;
    double norm_K_sq = 1.0;
    DiagProxFn prox_fstar_diag;  // optional, for diagonal preconditioning
    DiagProxFn prox_g_diag;      // optional, for diagonal preconditioning
    CounterFn inner_iterations;  // optional
};

struct RunRecord {
    long iter = 0;
    double elapsed_s = 0.0;
    long prox_count = 0;
    long inner_iter_count = 0;
    std::optional<double> l2_rel_error;
    std::optional<double> objective;
    bool prox_applied = false;
};

/// Per-iteration records; iterations strictly increase and counters never decrease.
class IterationLog {
public:
    void append(const RunRecord& record);
    void reserve(std::size_t n) { records_.reserve(n); }

    const std::vector<RunRecord>& records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }
    const RunRecord& back() const { return records_.back(); }
    const RunRecord& operator[](std::size_t i) const { return records_[i]; }

private:
    std::vector<RunRecord> records_;
};

/// Called once per iteration with the fresh record and the current primal
/// iterate. May fill l2_rel_error / objective. Returning true stops the run.
using Monitor = std::function<bool(RunRecord& record, ConstView x)>;

struct SolverResult {
    Vec x;
    Vec y;  // dual iterate (primal-dual methods)
    Vec h;  // control variate (skip methods)
    IterationLog log;
    long iterations = 0;
    bool stopped_early = false;
};

/// Bookkeeping shared by all solvers: wall clock, counters, finiteness check
/// and the monitor call.
class RunTracker {
public:
    RunTracker(std::string algorithm, const Monitor& monitor, const CounterFn& inner,
               long expected_iters);

    /// Records iteration `iter`; returns true when the monitor asks to stop.
    bool step(long iter, bool prox_applied, ConstView x);
    long prox_count() const noexcept { return prox_count_; }
    IterationLog take_log() { return std::move(log_); }

private:
    std::string algorithm_;
    const Monitor& monitor_;
    const CounterFn& inner_;
    std::chrono::steady_clock::time_point start_;
    long prox_count_ = 0;
    IterationLog log_;
};

/// Gradient descent: x <- x - gamma grad f(x).
SolverResult run_gd(const SmoothProblem& p, Vec x0, double gamma, long iters,
                    const Monitor& monitor = {});

/// Proximal gradient (ISTA): x <- prox_{gamma g}(x - gamma grad f(x)).
SolverResult run_pgd(const ProxProblem& p, Vec x0, double gamma, long iters,
                     const Monitor& monitor = {});

/// FISTA with the Beck-Teboulle momentum sequence, t_0 = 1.
SolverResult run_fista(const ProxProblem& p, Vec x0, double gamma, long iters,
                       const Monitor& monitor = {});

/// Accelerated projected gradient: FISTA with a projection as the prox.
SolverResult run_aprojgd(const SmoothProblem& p, const ProxFn& projector, Vec x0, double gamma,
                         long iters, const Monitor& monitor = {});

/// Primal-dual hybrid gradient with theta = 1:
///   x+ = prox_{sigma g}(x - sigma K^T y),  y+ = prox_{tau f*}(y + tau K (2x+ - x)).
/// Requires sigma * tau * norm_K_sq <= 1.
SolverResult run_pdhg(const SaddleProblem& p, Vec x0, Vec y0, double sigma, double tau,
                      long iters, const Monitor& monitor = {});

/// Step sizes used by run_pdhg_preconditioned: primal steps 1 / (column sums
/// of |K|), dual steps 1 / (row sums of |K|), sums floored at 1e-12.
struct DiagonalSteps {
    Vec primal;
    Vec dual;
};
DiagonalSteps diagonal_steps(const LinearMap& K);

/// PDHG with diagonal preconditioning; needs prox_fstar_diag and prox_g_diag.
/// Empty x0 / y0 start from zero.
SolverResult run_pdhg_preconditioned(const SaddleProblem& p, long iters,
                                     const Monitor& monitor = {}, Vec x0 = {}, Vec y0 = {});

} // namespace imgskip
