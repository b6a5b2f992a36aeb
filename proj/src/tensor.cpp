#include "imgskip/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "imgskip/errors.hpp"

namespace imgskip {

namespace {

void require_positive(std::size_t a, std::size_t b, const char* what) {
    if (a == 0 || b == 0)
        throw ShapeError(std::string(what) + ": dimensions must be positive");
}

void require_same_length(std::size_t a, std::size_t b, const char* what) {
    if (a != b)
        throw ShapeError(std::string(what) + ": length mismatch (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
}

constexpr std::size_t kPairwiseBlock = 128;

template <typename Term>
double pairwise(std::size_t begin, std::size_t end, const Term& term) {
    const std::size_t n = end - begin;
    if (n <= kPairwiseBlock) {
        double s = 0.0;
        for (std::size_t k = begin; k < end; ++k) s += term(k);
        return s;
    }
    const std::size_t mid = begin + n / 2;
    return pairwise(begin, mid, term) + pairwise(mid, end, term);
}

} // namespace

Image::Image(std::size_t height, std::size_t width, double fill)
    : shape_{height, width}, data_(height * width, fill) {
    require_positive(height, width, "Image");
}

Image::Image(std::size_t height, std::size_t width, Vec data)
    : shape_{height, width}, data_(std::move(data)) {
    require_positive(height, width, "Image");
    require_same_length(data_.size(), height * width, "Image");
}

DualField::DualField(std::size_t height, std::size_t width, double fill)
    : shape_{height, width}, data_(2 * height * width, fill) {
    require_positive(height, width, "DualField");
}

DualField::DualField(std::size_t height, std::size_t width, Vec data)
    : shape_{height, width}, data_(std::move(data)) {
    require_positive(height, width, "DualField");
    require_same_length(data_.size(), 2 * height * width, "DualField");
}

double DualField::magnitude(std::size_t k) const {
    const std::size_t n = shape_.size();
    return std::hypot(data_[k], data_[n + k]);
}

Sinogram::Sinogram(std::size_t n_angles, std::size_t n_bins, double fill)
    : n_angles_(n_angles), n_bins_(n_bins), data_(n_angles * n_bins, fill) {
    require_positive(n_angles, n_bins, "Sinogram");
}

Sinogram::Sinogram(std::size_t n_angles, std::size_t n_bins, Vec data)
    : n_angles_(n_angles), n_bins_(n_bins), data_(std::move(data)) {
    require_positive(n_angles, n_bins, "Sinogram");
    require_same_length(data_.size(), n_angles * n_bins, "Sinogram");
}

double dot(ConstView a, ConstView b) {
    require_same_length(a.size(), b.size(), "dot");
    return pairwise(0, a.size(), [&](std::size_t k) { return a[k] * b[k]; });
}

double norm2(ConstView a) {
    return std::sqrt(pairwise(0, a.size(), [&](std::size_t k) { return a[k] * a[k]; }));
}

double sum(ConstView a) {
    return pairwise(0, a.size(), [&](std::size_t k) { return a[k]; });
}

Vec axpby(double alpha, ConstView x, double beta, ConstView y) {
    require_same_length(x.size(), y.size(), "axpby");
    Vec out(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) out[k] = alpha * x[k] + beta * y[k];
    return out;
}

double rel_error(ConstView x, ConstView ref) {
    require_same_length(x.size(), ref.size(), "rel_error");
    const double denom = norm2(ref);
    if (denom == 0.0) throw DivideByZeroError("rel_error: reference has zero norm");
    const double num = std::sqrt(pairwise(0, x.size(), [&](std::size_t k) {
        const double d = x[k] - ref[k];
        return d * d;
    }));
    return num / denom;
}

bool all_finite(ConstView a) noexcept {
    return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

void add_scaled(View y, double a, ConstView x) {
    require_same_length(y.size(), x.size(), "add_scaled");
    for (std::size_t k = 0; k < y.size(); ++k) y[k] += a * x[k];
}

void lincomb(View out, double a, ConstView x, double b, ConstView y) {
    require_same_length(x.size(), y.size(), "lincomb");
    require_same_length(out.size(), x.size(), "lincomb");
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = a * x[k] + b * y[k];
}

void scale(View x, double a) noexcept {
    for (double& v : x) v *= a;
}

void copy(ConstView src, View dst) {
    require_same_length(src.size(), dst.size(), "copy");
    std::copy(src.begin(), src.end(), dst.begin());
}

void fill(View x, double value) noexcept { std::fill(x.begin(), x.end(), value); }

} // namespace imgskip
