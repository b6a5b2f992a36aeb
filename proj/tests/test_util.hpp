#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <random>

#include "imgskip/operators.hpp"
#include "imgskip/tensor.hpp"

namespace testutil {

inline imgskip::Vec random_vec(std::size_t n, std::uint64_t seed, double lo = -1.0,
                               double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    imgskip::Vec v(n);
    for (double& x : v) x = dist(rng);
    return v;
}

inline imgskip::Vec gaussian_vec(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    imgskip::Vec v(n);
    for (double& x : v) x = dist(rng);
    return v;
}

// Plain left-to-right sums in long double, independent of the library kernels.
inline long double naive_dot(imgskip::ConstView a, imgskip::ConstView b) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long double>(a[i]) * b[i];
    return s;
}

inline double naive_norm(imgskip::ConstView a) {
    return static_cast<double>(std::sqrt(naive_dot(a, a)));
}

inline double max_abs_diff(imgskip::ConstView a, imgskip::ConstView b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// Forward differences with a zero last row/column, written out per pixel.
// Returns [dy..., dx...].
inline imgskip::Vec naive_grad(imgskip::ConstView u, std::size_t h, std::size_t w) {
    imgskip::Vec q(2 * h * w, 0.0);
    for (std::size_t i = 0; i < h; ++i)
        for (std::size_t j = 0; j < w; ++j) {
            const std::size_t k = i * w + j;
            if (i + 1 < h) q[k] = u[k + w] - u[k];
            if (j + 1 < w) q[h * w + k] = u[k + 1] - u[k];
        }
    return q;
}

// div = -grad^T, scattering each difference back onto its two pixels.
inline imgskip::Vec naive_div(imgskip::ConstView q, std::size_t h, std::size_t w) {
    imgskip::Vec d(h * w, 0.0);
    for (std::size_t i = 0; i < h; ++i)
        for (std::size_t j = 0; j < w; ++j) {
            const std::size_t k = i * w + j;
            if (i + 1 < h) {
                d[k + w] -= q[k];
                d[k] += q[k];
            }
            if (j + 1 < w) {
                d[k + 1] -= q[h * w + k];
                d[k] += q[h * w + k];
            }
        }
    return d;
}

inline double naive_tv(imgskip::ConstView u, std::size_t h, std::size_t w) {
    const imgskip::Vec q = naive_grad(u, h, w);
    long double s = 0.0L;
    for (std::size_t k = 0; k < h * w; ++k) s += std::hypot(q[k], q[h * w + k]);
    return static_cast<double>(s);
}

// Dual projected gradient for the ROF prox, written against the naive
// difference operators, with Nesterov momentum. Returns the terminal dual
// iterate. Plain iterations converge too slowly to serve as a 1e-5 oracle on
// 32x32 denoising (1e5 of them still leave ~2e-5 relative error).
inline imgskip::Vec rof_dual_oracle(const imgskip::Image& x, double weight, int iters) {
    const std::size_t h = x.height(), w = x.width(), n = x.size();
    imgskip::Vec q(2 * n, 0.0), z(2 * n, 0.0), u(n);
    double t = 1.0;
    for (int it = 0; it < iters; ++it) {
        const imgskip::Vec d = naive_div(z, h, w);
        for (std::size_t k = 0; k < n; ++k) u[k] = x.flat()[k] + d[k];
        const imgskip::Vec g = naive_grad(u, h, w);
        const imgskip::Vec q_old = q;
        for (std::size_t k = 0; k < n; ++k) {
            const double a = z[k] + g[k] / 8.0, b = z[n + k] + g[n + k] / 8.0;
            const double s = weight / std::max(weight, std::hypot(a, b));
            q[k] = a * s;
            q[n + k] = b * s;
        }
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const double c = (t - 1.0) / t_next;
        for (std::size_t k = 0; k < 2 * n; ++k) z[k] = q[k] + c * (q[k] - q_old[k]);
        t = t_next;
    }
    return q;
}

inline imgskip::Vec rof_primal(const imgskip::Image& x, const imgskip::Vec& q) {
    const imgskip::Vec d = naive_div(q, x.height(), x.width());
    imgskip::Vec u(x.size());
    for (std::size_t k = 0; k < u.size(); ++k) u[k] = x.flat()[k] + d[k];
    return u;
}

// Dense row-major matrix as a LinearMap, with |K| for the preconditioner.
inline imgskip::LinearMap dense_map(std::size_t rows, std::size_t cols, imgskip::Vec m) {
    auto mat = std::make_shared<const imgskip::Vec>(std::move(m));
    auto mul = [mat, rows, cols](bool transpose, bool absolute) {
        return [mat, rows, cols, transpose, absolute](imgskip::ConstView in, imgskip::View out) {
            std::fill(out.begin(), out.end(), 0.0);
            for (std::size_t i = 0; i < rows; ++i)
                for (std::size_t j = 0; j < cols; ++j) {
                    const double a = absolute ? std::abs((*mat)[i * cols + j]) : (*mat)[i * cols + j];
                    if (transpose) out[j] += a * in[i];
                    else out[i] += a * in[j];
                }
        };
    };
    return imgskip::LinearMap("dense", imgskip::ElementShape::vector(cols),
                              imgskip::ElementShape::vector(rows), mul(false, false),
                              mul(true, false), mul(false, true), mul(true, true));
}

} // namespace testutil
