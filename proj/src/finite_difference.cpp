#include "imgskip/errors.hpp"
#include "imgskip/operators.hpp"

namespace imgskip {

namespace {

void require_grid(GridShape shape) {
    if (shape.height < 2 || shape.width < 2)
        throw ShapeError("finite differences need at least 2x2 pixels, got " +
                         std::to_string(shape.height) + "x" + std::to_string(shape.width));
}

// |D| u: same stencil as D with both taps positive.
void apply_abs_gradient(ConstView u, GridShape shape, View q) {
    const std::size_t h = shape.height, w = shape.width, n = shape.size();
    for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t j = 0; j < w; ++j) {
            const std::size_t k = i * w + j;
            q[k] = i + 1 < h ? u[k + w] + u[k] : 0.0;
            q[n + k] = j + 1 < w ? u[k + 1] + u[k] : 0.0;
        }
    }
}

void apply_abs_gradient_adjoint(ConstView q, GridShape shape, View u) {
    const std::size_t h = shape.height, w = shape.width, n = shape.size();
    for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t j = 0; j < w; ++j) {
            const std::size_t k = i * w + j;
            double acc = 0.0;
            if (i + 1 < h) acc += q[k];
            if (i > 0) acc += q[k - w];
            if (j + 1 < w) acc += q[n + k];
            if (j > 0) acc += q[n + k - 1];
            u[k] = acc;
        }
    }
}

} // namespace

void apply_gradient(ConstView u, GridShape shape, View q) {
    require_grid(shape);
    const std::size_t h = shape.height, w = shape.width, n = shape.size();
    if (u.size() != n || q.size() != 2 * n) throw ShapeError("apply_gradient: size mismatch");
    double* qy = q.data();
    double* qx = q.data() + n;
    for (std::size_t i = 0; i + 1 < h; ++i) {
        const double* row = u.data() + i * w;
        for (std::size_t j = 0; j < w; ++j) qy[i * w + j] = row[j + w] - row[j];
    }
    for (std::size_t j = 0; j < w; ++j) qy[(h - 1) * w + j] = 0.0;
    for (std::size_t i = 0; i < h; ++i) {
        const double* row = u.data() + i * w;
        double* out = qx + i * w;
        for (std::size_t j = 0; j + 1 < w; ++j) out[j] = row[j + 1] - row[j];
        out[w - 1] = 0.0;
    }
}

void apply_divergence(ConstView q, GridShape shape, View u) {
    require_grid(shape);
    const std::size_t h = shape.height, w = shape.width, n = shape.size();
    if (u.size() != n || q.size() != 2 * n) throw ShapeError("apply_divergence: size mismatch");
    const double* qy = q.data();
    const double* qx = q.data() + n;
    // Backward differences; the boundary rows/columns mirror the zeroed
    // last row/column of the forward difference.
    for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t j = 0; j < w; ++j) {
            const std::size_t k = i * w + j;
            double dy;
            if (i == 0) dy = qy[k];
            else if (i + 1 == h) dy = -qy[k - w];
            else dy = qy[k] - qy[k - w];
            double dx;
            if (j == 0) dx = qx[k];
            else if (j + 1 == w) dx = -qx[k - 1];
            else dx = qx[k] - qx[k - 1];
            u[k] = dy + dx;
        }
    }
}

DualField grad_forward(const Image& u) {
    DualField q(u.shape());
    apply_gradient(u.flat(), u.shape(), q.flat());
    return q;
}

Image divergence(const DualField& q) {
    Image u(q.shape());
    apply_divergence(q.flat(), q.shape(), u.flat());
    return u;
}

LinearMap gradient_map(GridShape shape) {
    require_grid(shape);
    LinearMap map(
        "D", ElementShape::image(shape), ElementShape::dual(shape),
        [shape](ConstView u, View q) { apply_gradient(u, shape, q); },
        [shape](ConstView q, View u) {
            apply_divergence(q, shape, u);
            scale(u, -1.0);
        },
        [shape](ConstView u, View q) { apply_abs_gradient(u, shape, q); },
        [shape](ConstView q, View u) { apply_abs_gradient_adjoint(q, shape, u); });
    // Analytic bound: each pixel enters at most four differences of unit weight.
    map.set_norm_sq(8.0);
    return map;
}

LinearMap divergence_map(GridShape shape) {
    require_grid(shape);
    LinearMap map(
        "div", ElementShape::dual(shape), ElementShape::image(shape),
        [shape](ConstView q, View u) { apply_divergence(q, shape, u); },
        [shape](ConstView u, View q) {
            apply_gradient(u, shape, q);
            scale(q, -1.0);
        },
        [shape](ConstView q, View u) { apply_abs_gradient_adjoint(q, shape, u); },
        [shape](ConstView u, View q) { apply_abs_gradient(u, shape, q); });
    map.set_norm_sq(8.0);
    return map;
}

} // namespace imgskip
