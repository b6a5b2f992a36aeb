#include <algorithm>
#include <cmath>
#include <numbers>

#include "imgskip/errors.hpp"
#include "imgskip/operators.hpp"

namespace imgskip {

RadonGeometry RadonGeometry::uniform(std::size_t image_side, std::size_t n_angles,
                                     std::size_t n_bins, double bin_spacing) {
    RadonGeometry g;
    g.image_side = image_side;
    g.n_bins = n_bins;
    g.bin_spacing = bin_spacing;
    g.angles.resize(n_angles);
    for (std::size_t a = 0; a < n_angles; ++a)
        g.angles[a] = std::numbers::pi * static_cast<double>(a) / static_cast<double>(n_angles);
    g.validate();
    return g;
}

void RadonGeometry::validate() const {
    if (image_side == 0 || n_bins == 0 || angles.empty())
        throw ShapeError("RadonGeometry: sizes must be positive");
    if (n_bins < image_side) throw ShapeError("RadonGeometry: n_bins must be >= image_side");
    if (!(bin_spacing > 0.0)) throw ParameterError("RadonGeometry: bin_spacing must be positive");
    for (std::size_t a = 0; a < angles.size(); ++a) {
        if (!(angles[a] >= 0.0 && angles[a] < std::numbers::pi))
            throw ParameterError("RadonGeometry: angles must lie in [0, pi)");
        if (a > 0 && !(angles[a] > angles[a - 1]))
            throw ParameterError("RadonGeometry: angles must be strictly increasing");
    }
}

RadonProjector::RadonProjector(RadonGeometry geometry) : geometry_(std::move(geometry)) {
    geometry_.validate();
    const std::size_t n = geometry_.image_side;
    const auto side = static_cast<double>(n);
    const double center = (side - 1.0) / 2.0;
    const double bin_center = (static_cast<double>(geometry_.n_bins) - 1.0) / 2.0;
    // Half-length of the sampled segment; covers the image diagonal.
    const auto half = static_cast<long>(std::ceil(side * std::numbers::sqrt2 / 2.0)) + 1;

    row_start_.reserve(geometry_.n_angles() * geometry_.n_bins + 1);
    row_start_.push_back(0);
    for (double theta : geometry_.angles) {
        const double dx = std::cos(theta), dy = std::sin(theta);
        // detector axis, perpendicular to the ray direction
        const double nx = -dy, ny = dx;
        for (std::size_t bin = 0; bin < geometry_.n_bins; ++bin) {
            const double s = (static_cast<double>(bin) - bin_center) * geometry_.bin_spacing;
            const double ox = center + s * nx, oy = center + s * ny;
            for (long t = -half; t <= half; ++t) {
                const double px = ox + static_cast<double>(t) * dx;
                const double py = oy + static_cast<double>(t) * dy;
                const double fx0 = std::floor(px), fy0 = std::floor(py);
                if (fx0 < -1.0 || fy0 < -1.0 || fx0 > side - 1.0 || fy0 > side - 1.0) continue;
                const auto x0 = static_cast<long>(fx0), y0 = static_cast<long>(fy0);
                const double fx = px - fx0, fy = py - fy0;
                const double wts[4] = {(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy, fx * fy};
                const long xs[4] = {x0, x0 + 1, x0, x0 + 1};
                const long ys[4] = {y0, y0, y0 + 1, y0 + 1};
                for (int c = 0; c < 4; ++c) {
                    if (wts[c] == 0.0) continue;
                    if (xs[c] < 0 || ys[c] < 0 || xs[c] >= static_cast<long>(n) ||
                        ys[c] >= static_cast<long>(n))
                        continue;
                    columns_.push_back(static_cast<std::uint32_t>(ys[c] * static_cast<long>(n) + xs[c]));
                    values_.push_back(wts[c]);
                }
            }
            row_start_.push_back(values_.size());
        }
    }
}

void RadonProjector::forward(ConstView image, View sinogram) const {
    const std::size_t rows = row_start_.size() - 1;
    if (image.size() != geometry_.image_side * geometry_.image_side || sinogram.size() != rows)
        throw ShapeError("radon forward: size mismatch with geometry");
    for (std::size_t r = 0; r < rows; ++r) {
        double acc = 0.0;
        for (std::size_t e = row_start_[r]; e < row_start_[r + 1]; ++e)
            acc += values_[e] * image[columns_[e]];
        sinogram[r] = acc;
    }
}

void RadonProjector::adjoint(ConstView sinogram, View image) const {
    const std::size_t rows = row_start_.size() - 1;
    if (image.size() != geometry_.image_side * geometry_.image_side || sinogram.size() != rows)
        throw ShapeError("radon adjoint: size mismatch with geometry");
    fill(image, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        const double v = sinogram[r];
        if (v == 0.0) continue;
        for (std::size_t e = row_start_[r]; e < row_start_[r + 1]; ++e)
            image[columns_[e]] += values_[e] * v;
    }
}

Sinogram radon_forward(const Image& u, const RadonGeometry& g) {
    if (u.height() != g.image_side || u.width() != g.image_side)
        throw ShapeError("radon_forward: image does not match geometry");
    const RadonProjector projector(g);
    Sinogram s(g.n_angles(), g.n_bins);
    projector.forward(u.flat(), s.flat());
    return s;
}

Image radon_adjoint(const Sinogram& s, const RadonGeometry& g) {
    if (s.n_angles() != g.n_angles() || s.n_bins() != g.n_bins)
        throw ShapeError("radon_adjoint: sinogram does not match geometry");
    const RadonProjector projector(g);
    Image u(g.image_side, g.image_side);
    projector.adjoint(s.flat(), u.flat());
    return u;
}

LinearMap radon_map(std::shared_ptr<const RadonProjector> projector) {
    const auto& g = projector->geometry();
    const GridShape grid{g.image_side, g.image_side};
    auto p = std::move(projector);
    return LinearMap(
        "A_radon", ElementShape::image(grid), ElementShape::sinogram(g.n_angles(), g.n_bins),
        [p](ConstView x, View y) { p->forward(x, y); },
        [p](ConstView y, View x) { p->adjoint(y, x); },
        [p](ConstView x, View y) { p->abs_forward(x, y); },
        [p](ConstView y, View x) { p->abs_adjoint(y, x); });
}

LinearMap radon_map(const RadonGeometry& g) {
    return radon_map(std::make_shared<const RadonProjector>(g));
}

} // namespace imgskip
