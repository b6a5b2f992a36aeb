#include "imgskip/phantoms.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "imgskip/errors.hpp"

namespace imgskip {

namespace {

// Shape layout, as fractions of the frame height (y) and width (x).
struct Rect {
    double y0, y1, x0, x1, value;
};
constexpr Rect kRects[] = {
    {0.10, 0.45, 0.08, 0.40, 0.8},
    {0.60, 0.90, 0.55, 0.92, 0.4},
};
constexpr double kDiscY = 0.30, kDiscX = 0.70, kDiscR = 0.18, kDiscValue = 1.0;
// Triangle vertices (y, x)
constexpr double kTri[3][2] = {{0.55, 0.10}, {0.92, 0.10}, {0.92, 0.45}};
constexpr double kTriValue = 0.6;

bool inside_triangle(double y, double x) {
    auto edge = [](const double* a, const double* b, double py, double px) {
        return (b[1] - a[1]) * (py - a[0]) - (b[0] - a[0]) * (px - a[1]);
    };
    const double e0 = edge(kTri[0], kTri[1], y, x);
    const double e1 = edge(kTri[1], kTri[2], y, x);
    const double e2 = edge(kTri[2], kTri[0], y, x);
    return (e0 >= 0 && e1 >= 0 && e2 >= 0) || (e0 <= 0 && e1 <= 0 && e2 <= 0);
}

} // namespace

Image gen_shapes_phantom(std::size_t height, std::size_t width) {
    if (height < 16 || width < 16) throw ShapeError("gen_shapes_phantom: need at least 16x16");
    Image u(height, width);
    const auto h = static_cast<double>(height), w = static_cast<double>(width);
    const double radius = kDiscR * std::min(h, w);
    for (std::size_t i = 0; i < height; ++i) {
        for (std::size_t j = 0; j < width; ++j) {
            // pixel centers in normalized coordinates
            const double y = (static_cast<double>(i) + 0.5) / h;
            const double x = (static_cast<double>(j) + 0.5) / w;
            double v = 0.0;
            for (const Rect& r : kRects)
                if (y >= r.y0 && y < r.y1 && x >= r.x0 && x < r.x1) v = r.value;
            if (inside_triangle(y, x)) v = kTriValue;
            const double dy = y * h - kDiscY * h, dx = x * w - kDiscX * w;
            if (dy * dy + dx * dx <= radius * radius) v = kDiscValue;
            u(i, j) = v;
        }
    }
    return u;
}

Image gen_disc_phantom(std::size_t n) {
    if (n < 16) throw ShapeError("gen_disc_phantom: need at least 16x16");
    Image u(n, n);
    const auto side = static_cast<double>(n);
    const double c = (side - 1.0) / 2.0;
    const double R = side / 2.0;
    struct Disc {
        double cy, cx, r_outer, r_inner, value;  // offsets and radii relative to R
    };
    // Painted in order; later entries overwrite earlier ones.
    constexpr Disc discs[] = {
        {0.0, 0.0, 0.85, 0.0, 0.3},     // body
        {0.0, 0.0, 0.85, 0.72, 0.6},    // shell
        {-0.30, -0.25, 0.22, 0.0, 1.0},
        {0.28, 0.30, 0.18, 0.0, 0.8},
        {0.30, -0.30, 0.15, 0.07, 0.9},  // small annulus
        {-0.25, 0.35, 0.08, 0.0, 0.0},   // void
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double y = (static_cast<double>(i) - c) / R;
            const double x = (static_cast<double>(j) - c) / R;
            double v = 0.0;
            for (const Disc& d : discs) {
                const double r = std::hypot(y - d.cy, x - d.cx);
                if (r <= d.r_outer && r >= d.r_inner) v = d.value;
            }
            if (std::hypot(y, x) > 1.0) v = 0.0;
            u(i, j) = v;
        }
    }
    return u;
}

Vec add_noise(ConstView u, double sigma, std::uint64_t seed) {
    if (!(sigma >= 0.0)) throw ParameterError("add_noise: sigma must be nonnegative");
    Vec out(u.begin(), u.end());
    if (sigma == 0.0) return out;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, sigma);
    for (double& v : out) v += normal(rng);
    return out;
}

Image add_noise(const Image& u, double sigma, std::uint64_t seed) {
    return Image(u.height(), u.width(), add_noise(u.flat(), sigma, seed));
}

Sinogram add_noise(const Sinogram& s, double sigma, std::uint64_t seed) {
    return Sinogram(s.n_angles(), s.n_bins(), add_noise(s.flat(), sigma, seed));
}

} // namespace imgskip
