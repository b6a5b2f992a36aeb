#include "imgskip/proximal.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "imgskip/errors.hpp"

namespace imgskip {

namespace {

void require_same(std::size_t a, std::size_t b, const char* what) {
    if (a != b) throw ShapeError(std::string(what) + ": size mismatch");
}

std::size_t dual_pixels(std::size_t flat_size, const char* what) {
    if (flat_size % 2 != 0) throw ShapeError(std::string(what) + ": dual buffer has odd length");
    return flat_size / 2;
}

} // namespace

void ProxParams::validate() const {
    if (!(step > 0.0)) throw ParameterError("ProxParams: step must be positive");
    if (!(alpha >= 0.0)) throw ParameterError("ProxParams: alpha must be nonnegative");
    if (huber_eps && !(*huber_eps >= 0.0))
        throw ParameterError("ProxParams: huber_eps must be nonnegative");
}

void project_ball(ConstView q, double alpha, View out) {
    if (!(alpha > 0.0)) throw ParameterError("project_ball: alpha must be positive");
    require_same(q.size(), out.size(), "project_ball");
    const std::size_t n = dual_pixels(q.size(), "project_ball");
    for (std::size_t k = 0; k < n; ++k) {
        const double qy = q[k], qx = q[n + k];
        const double mag = std::sqrt(qy * qy + qx * qx);
        if (mag > alpha) {
            const double s = alpha / mag;
            out[k] = s * qy;
            out[n + k] = s * qx;
        } else {
            out[k] = qy;
            out[n + k] = qx;
        }
    }
}

DualField project_ball(const DualField& q, double alpha) {
    DualField out(q.shape());
    project_ball(q.flat(), alpha, out.flat());
    return out;
}

void shrink_l21(ConstView q, double thresh, View out) {
    if (!(thresh >= 0.0)) throw ParameterError("shrink_l21: threshold must be nonnegative");
    require_same(q.size(), out.size(), "shrink_l21");
    const std::size_t n = dual_pixels(q.size(), "shrink_l21");
    for (std::size_t k = 0; k < n; ++k) {
        const double qy = q[k], qx = q[n + k];
        const double mag = std::sqrt(qy * qy + qx * qx);
        const double s = mag > thresh ? 1.0 - thresh / mag : 0.0;
        out[k] = s * qy;
        out[n + k] = s * qx;
    }
}

DualField shrink_l21(const DualField& q, double thresh) {
    DualField out(q.shape());
    shrink_l21(q.flat(), thresh, out.flat());
    return out;
}

void project_nonneg(ConstView u, View out) {
    require_same(u.size(), out.size(), "project_nonneg");
    for (std::size_t k = 0; k < u.size(); ++k) out[k] = std::max(u[k], 0.0);
}

Image project_nonneg(const Image& u) {
    Image out(u.shape());
    project_nonneg(u.flat(), out.flat());
    return out;
}

void prox_l2_fidelity(ConstView x, ConstView b, double tau, View out) {
    require_same(x.size(), b.size(), "prox_l2_fidelity");
    require_same(x.size(), out.size(), "prox_l2_fidelity");
    if (tau < 0.0) throw ParameterError("prox_l2_fidelity: tau must be nonnegative");
    if (tau == 0.0) {
        copy(x, out);
        return;
    }
    const double inv = 1.0 / (1.0 + tau);
    for (std::size_t k = 0; k < x.size(); ++k) out[k] = (x[k] + tau * b[k]) * inv;
}

Vec prox_l2_fidelity(ConstView x, ConstView b, double tau) {
    Vec out(x.size());
    prox_l2_fidelity(x, b, tau, out);
    return out;
}

void soft_threshold(ConstView x, double thresh, View out) {
    require_same(x.size(), out.size(), "soft_threshold");
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double v = x[k];
        out[k] = v > thresh ? v - thresh : (v < -thresh ? v + thresh : 0.0);
    }
}

void prox_conjugate(const ProxFn& prox_f, ConstView x, double tau, View out) {
    require_same(x.size(), out.size(), "prox_conjugate");
    if (tau < 0.0) throw ParameterError("prox_conjugate: tau must be nonnegative");
    if (tau == 0.0) {
        copy(x, out);
        return;
    }
    Vec scaled(x.begin(), x.end());
    scale(scaled, 1.0 / tau);
    Vec p(x.size());
    prox_f(scaled, 1.0 / tau, p);
    for (std::size_t k = 0; k < x.size(); ++k) out[k] = x[k] - tau * p[k];
}

Vec prox_conjugate(const ProxFn& prox_f, ConstView x, double tau) {
    Vec out(x.size());
    prox_conjugate(prox_f, x, tau, out);
    return out;
}

Vec prox_zero(ConstView x) { return Vec(x.begin(), x.end()); }

ProxFn make_prox_zero() {
    return [](ConstView x, double, View out) { copy(x, out); };
}

ProxFn make_prox_nonneg() {
    return [](ConstView x, double, View out) { project_nonneg(x, out); };
}

ProxFn make_prox_l2_fidelity(Vec b) {
    auto data = std::make_shared<const Vec>(std::move(b));
    return [data](ConstView x, double step, View out) { prox_l2_fidelity(x, *data, step, out); };
}

ProxFn make_prox_l1(double lambda) {
    if (!(lambda >= 0.0)) throw ParameterError("make_prox_l1: lambda must be nonnegative");
    return [lambda](ConstView x, double step, View out) { soft_threshold(x, step * lambda, out); };
}

ProxFn make_prox_l21(double alpha) {
    if (!(alpha >= 0.0)) throw ParameterError("make_prox_l21: alpha must be nonnegative");
    return [alpha](ConstView x, double step, View out) { shrink_l21(x, step * alpha, out); };
}

ProxFn make_project_ball(double alpha) {
    if (!(alpha > 0.0)) throw ParameterError("make_project_ball: alpha must be positive");
    return [alpha](ConstView x, double, View out) { project_ball(x, alpha, out); };
}

ProxFn make_prox_conjugate(ProxFn prox_f) {
    return [prox_f = std::move(prox_f)](ConstView x, double step, View out) {
        prox_conjugate(prox_f, x, step, out);
    };
}

} // namespace imgskip
