#include "imgskip/tv_prox.hpp"

#include <algorithm>
#include <cmath>

#include "imgskip/errors.hpp"
#include "imgskip/operators.hpp"
#include "imgskip/proximal.hpp"

namespace imgskip {

namespace {

constexpr double kDualStep = 1.0 / 8.0;

// u = x + div q, clamped at zero when requested.
void recover_primal(ConstView x, ConstView q, GridShape shape, bool nonneg, View u) {
    apply_divergence(q, shape, u);
    if (nonneg) {
        for (std::size_t k = 0; k < u.size(); ++k) u[k] = std::max(x[k] + u[k], 0.0);
    } else {
        for (std::size_t k = 0; k < u.size(); ++k) u[k] += x[k];
    }
}

} // namespace

double tv_value(ConstView u, GridShape shape) {
    Vec q(2 * shape.size());
    apply_gradient(u, shape, q);
    const std::size_t n = shape.size();
    Vec mag(n);
    for (std::size_t k = 0; k < n; ++k) mag[k] = std::sqrt(q[k] * q[k] + q[n + k] * q[n + k]);
    return sum(mag);
}

double tv_value(const Image& u) { return tv_value(u.flat(), u.shape()); }

TvProxState::TvProxState(GridShape shape, int inner_iters_, bool accelerated_, bool nonneg_)
    : q_warm(shape), inner_iters(inner_iters_), accelerated(accelerated_), nonneg(nonneg_) {
    if (inner_iters < 1) throw ParameterError("TvProxState: inner_iters must be >= 1");
}

void tv_prox(ConstView x, double weight, TvProxState& state, View out) {
    const GridShape shape = state.q_warm.shape();
    const std::size_t n = shape.size();
    if (x.size() != n || out.size() != n) throw ShapeError("tv_prox: size mismatch with state");
    if (weight < 0.0) throw ParameterError("tv_prox: weight must be nonnegative");
    if (state.inner_iters < 1) throw ParameterError("tv_prox: inner_iters must be >= 1");
    if (weight == 0.0) {
        fill(state.q_warm.flat(), 0.0);
        if (state.nonneg) project_nonneg(x, out);
        else copy(x, out);
        ++state.calls;
        return;
    }

    // The ball radius may have changed since the last call.
    View q = state.q_warm.flat();
    project_ball(q, weight, q);

    Vec z(q.begin(), q.end());   // extrapolated point
    Vec q_prev(q.begin(), q.end());
    Vec u(n);
    Vec g(2 * n);
    double t = 1.0;
    for (int it = 0; it < state.inner_iters; ++it) {
        recover_primal(x, z, shape, state.nonneg, u);
        apply_gradient(u, shape, g);
        for (std::size_t k = 0; k < g.size(); ++k) g[k] = z[k] + kDualStep * g[k];
        copy(q, q_prev);
        project_ball(g, weight, q);
        if (state.accelerated) {
            const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            const double a = (t - 1.0) / t_next;
            for (std::size_t k = 0; k < z.size(); ++k) z[k] = q[k] + a * (q[k] - q_prev[k]);
            t = t_next;
        } else {
            copy(q, z);
        }
    }
    recover_primal(x, q, shape, state.nonneg, out);
    state.total_inner_iterations += state.inner_iters;
    ++state.calls;
}

Image tv_prox(const Image& x, double weight, TvProxState& state) {
    Image out(x.shape());
    tv_prox(x.flat(), weight, state, out.flat());
    return out;
}

double dual_gap_rof(const Image& x, const DualField& q, double weight) {
    if (!(weight > 0.0)) throw ParameterError("dual_gap_rof: weight must be positive");
    if (x.shape() != q.shape()) throw ShapeError("dual_gap_rof: shape mismatch");
    for (std::size_t k = 0; k < x.size(); ++k)
        if (q.magnitude(k) > weight * (1.0 + 1e-12))
            throw DomainError("dual_gap_rof: q lies outside the dual ball");
    const Image div_q = divergence(q);
    Vec u = axpby(1.0, x.flat(), 1.0, div_q.flat());
    const double nd = norm2(div_q.flat());
    const double primal = 0.5 * nd * nd + weight * tv_value(u, x.shape());
    const double nx = norm2(x.flat());
    const double nu = norm2(u);
    const double dual = 0.5 * nx * nx - 0.5 * nu * nu;
    return primal - dual;
}

} // namespace imgskip
