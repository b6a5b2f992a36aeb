#pragma once

#include <functional>
#include <optional>

#include "imgskip/tensor.hpp"

namespace imgskip {

/// prox_{step * g}(x) written into out. out must have the size of x.
using ProxFn = std::function<void(ConstView x, double step, View out)>;

/// Step and weight of a proximal evaluation.
struct ProxParams {
    double step = 1.0;
    double alpha = 0.0;
    std::optional<double> huber_eps;

    void validate() const;
};

// Pointwise operations on dual fields. Flat overloads take the
// channel-separated buffer of a DualField (length 2 * pixels).

/// alpha * q / max(alpha, |q|) per pixel: projection onto {||q||_{2,inf} <= alpha}.
DualField project_ball(const DualField& q, double alpha);
void project_ball(ConstView q, double alpha, View out);

/// Prox of thresh * ||.||_{2,1}: q * max(0, 1 - thresh / |q|) per pixel.
DualField shrink_l21(const DualField& q, double thresh);
void shrink_l21(ConstView q, double thresh, View out);

Image project_nonneg(const Image& u);
void project_nonneg(ConstView u, View out);

/// Prox of z -> 0.5 ||z - b||^2 with step tau: (x + tau b) / (1 + tau).
Vec prox_l2_fidelity(ConstView x, ConstView b, double tau);
void prox_l2_fidelity(ConstView x, ConstView b, double tau, View out);

/// Prox of lambda * ||.||_1 with step tau.
void soft_threshold(ConstView x, double thresh, View out);

/// Moreau identity: prox_{tau f*}(x) = x - tau prox_{f / tau}(x / tau).
void prox_conjugate(const ProxFn& prox_f, ConstView x, double tau, View out);
Vec prox_conjugate(const ProxFn& prox_f, ConstView x, double tau);

Vec prox_zero(ConstView x);

// Prox oracles for the solvers.

ProxFn make_prox_zero();
ProxFn make_prox_nonneg();
/// g = 0.5 ||. - b||^2.
ProxFn make_prox_l2_fidelity(Vec b);
/// g = lambda ||.||_1.
ProxFn make_prox_l1(double lambda);
/// g = alpha ||.||_{2,1} on a flat dual field.
ProxFn make_prox_l21(double alpha);
/// g = indicator of the dual ball of radius alpha (step-independent).
ProxFn make_project_ball(double alpha);
/// Prox of the convex conjugate of the function behind prox_f.
ProxFn make_prox_conjugate(ProxFn prox_f);

} // namespace imgskip
