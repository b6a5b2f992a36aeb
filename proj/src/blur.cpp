#include <cmath>
#include <vector>

#include "imgskip/errors.hpp"
#include "imgskip/operators.hpp"

namespace imgskip {

namespace {

void circular_filter(ConstView in, GridShape shape, const BlurKernel& k, bool flip, View out) {
    const std::size_t h = shape.height, w = shape.width, s = k.size(), r = k.radius();
    // Convolution reads u(i - (a - r)); correlation reads u(i + (a - r)).
    auto wrap = [flip, r](std::size_t pos, std::size_t tap, std::size_t n) {
        return flip ? (pos + n + r - tap) % n : (pos + n + tap - r) % n;
    };
    fill(out, 0.0);
    for (std::size_t i = 0; i < h; ++i) {
        double* dst = out.data() + i * w;
        for (std::size_t a = 0; a < s; ++a) {
            const double* row = in.data() + wrap(i, a, h) * w;
            for (std::size_t b = 0; b < s; ++b) {
                const double kab = k(a, b);
                if (kab == 0.0) continue;
                // dst[j] += kab * row[(j + shift) mod w], split at the wrap point
                const std::size_t shift = wrap(0, b, w);
                const std::size_t split = w - shift;
                for (std::size_t j = 0; j < split; ++j) dst[j] += kab * row[j + shift];
                for (std::size_t j = split; j < w; ++j) dst[j] += kab * row[j - split];
            }
        }
    }
}

void require_fits(GridShape shape, const BlurKernel& k) {
    if (k.size() > shape.height || k.size() > shape.width)
        throw ShapeError("blur: kernel of size " + std::to_string(k.size()) +
                         " exceeds image " + std::to_string(shape.height) + "x" +
                         std::to_string(shape.width));
}

} // namespace

BlurKernel::BlurKernel(std::size_t size, Vec weights) : size_(size), weights_(std::move(weights)) {
    if (size_ == 0 || size_ % 2 == 0) throw ParameterError("BlurKernel: size must be odd");
    if (weights_.size() != size_ * size_) throw ShapeError("BlurKernel: expected size^2 weights");
    for (double v : weights_)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw ParameterError("BlurKernel: weights must be finite and nonnegative");
    if (std::abs(sum(weights_) - 1.0) > 1e-12)
        throw ParameterError("BlurKernel: weights must sum to 1");
}

BlurKernel BlurKernel::identity(std::size_t size) {
    Vec w(size * size, 0.0);
    if (size % 2 == 1) w[(size / 2) * size + size / 2] = 1.0;
    return BlurKernel(size, std::move(w));
}

BlurKernel BlurKernel::box(std::size_t size) {
    return BlurKernel(size, Vec(size * size, 1.0 / static_cast<double>(size * size)));
}

BlurKernel BlurKernel::gaussian(std::size_t size, double sigma) {
    if (!(sigma > 0.0)) throw ParameterError("BlurKernel::gaussian: sigma must be positive");
    if (size % 2 == 0) throw ParameterError("BlurKernel: size must be odd");
    Vec w(size * size);
    const double c = static_cast<double>(size / 2);
    for (std::size_t a = 0; a < size; ++a)
        for (std::size_t b = 0; b < size; ++b) {
            const double dy = static_cast<double>(a) - c, dx = static_cast<double>(b) - c;
            w[a * size + b] = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
        }
    const double total = sum(w);
    for (double& v : w) v /= total;
    // Renormalize once more so the sum is 1 to rounding.
    const double again = sum(w);
    for (double& v : w) v /= again;
    return BlurKernel(size, std::move(w));
}

Image blur_forward(const Image& u, const BlurKernel& k) {
    require_fits(u.shape(), k);
    Image out(u.shape());
    circular_filter(u.flat(), u.shape(), k, true, out.flat());
    return out;
}

Image blur_adjoint(const Image& r, const BlurKernel& k) {
    require_fits(r.shape(), k);
    Image out(r.shape());
    circular_filter(r.flat(), r.shape(), k, false, out.flat());
    return out;
}

LinearMap blur_map(GridShape shape, const BlurKernel& k) {
    require_fits(shape, k);
    auto forward = [shape, k](ConstView in, View out) { circular_filter(in, shape, k, true, out); };
    auto adjoint = [shape, k](ConstView in, View out) { circular_filter(in, shape, k, false, out); };
    LinearMap map("A_blur", ElementShape::image(shape), ElementShape::image(shape), forward,
                  adjoint, forward, adjoint);
    // Nonnegative kernel of unit mass: ||A|| <= ||k||_1 = 1, attained on constants.
    map.set_norm_sq(1.0);
    return map;
}

} // namespace imgskip
