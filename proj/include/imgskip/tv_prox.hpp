#pragma once

#include "imgskip/tensor.hpp"

namespace imgskip {

/// Isotropic total variation: sum over pixels of |(D_y u, D_x u)|.
double tv_value(const Image& u);
double tv_value(ConstView u, GridShape shape);

/// Warm-startable state of the inner TV denoising solver.
///
/// The solver runs projected gradient (or its accelerated variant) on the
/// dual of min_u 0.5 ||u - x||^2 + weight TV(u) [+ nonnegativity], with step
/// 1/8 and a fixed iteration budget. The terminal dual iterate is kept for the
/// next call; momentum restarts on every call.
struct TvProxState {
    TvProxState(GridShape shape, int inner_iters, bool accelerated = true, bool nonneg = false);

    DualField q_warm;
    int inner_iters;
    bool accelerated;
    bool nonneg;
    long total_inner_iterations = 0;
    long calls = 0;
};

/// Approximate prox of weight * TV (plus the nonnegativity indicator when
/// state.nonneg) at x. Runs exactly state.inner_iters dual iterations.
Image tv_prox(const Image& x, double weight, TvProxState& state);
void tv_prox(ConstView x, double weight, TvProxState& state, View out);

/// ROF duality gap at dual point q: primal value at u = x + div q minus the
/// dual value 0.5 ||x||^2 - 0.5 ||x + div q||^2. Throws DomainError if q
/// leaves the ball of radius weight.
double dual_gap_rof(const Image& x, const DualField& q, double weight);

} // namespace imgskip
