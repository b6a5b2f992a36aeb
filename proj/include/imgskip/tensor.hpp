#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace imgskip {

using Vec = std::vector<double>;
using ConstView = std::span<const double>;
using View = std::span<double>;

/// Height x width of a 2-D pixel grid.
struct GridShape {
    std::size_t height = 0;
    std::size_t width = 0;

    std::size_t size() const noexcept { return height * width; }
    friend bool operator==(const GridShape&, const GridShape&) = default;
};

/// Real 2-D image, row-major.
class Image {
public:
    Image() = default;
    Image(std::size_t height, std::size_t width, double fill = 0.0);
    Image(std::size_t height, std::size_t width, Vec data);
    explicit Image(GridShape shape, double fill = 0.0) : Image(shape.height, shape.width, fill) {}

    std::size_t height() const noexcept { return shape_.height; }
    std::size_t width() const noexcept { return shape_.width; }
    GridShape shape() const noexcept { return shape_; }
    std::size_t size() const noexcept { return data_.size(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * shape_.width + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * shape_.width + j]; }

    View flat() noexcept { return data_; }
    ConstView flat() const noexcept { return data_; }
    const Vec& vec() const noexcept { return data_; }
    Vec release() && { return std::move(data_); }

    friend bool operator==(const Image&, const Image&) = default;

private:
    GridShape shape_;
    Vec data_;
};

/// Two-channel field on an image grid, stored channel-separated: the vertical
/// difference channel first, then the horizontal one, in one contiguous buffer.
class DualField {
public:
    DualField() = default;
    DualField(std::size_t height, std::size_t width, double fill = 0.0);
    DualField(std::size_t height, std::size_t width, Vec data);
    explicit DualField(GridShape shape, double fill = 0.0)
        : DualField(shape.height, shape.width, fill) {}

    std::size_t height() const noexcept { return shape_.height; }
    std::size_t width() const noexcept { return shape_.width; }
    GridShape shape() const noexcept { return shape_; }
    std::size_t size() const noexcept { return data_.size(); }

    View y() noexcept { return View(data_).first(shape_.size()); }
    ConstView y() const noexcept { return ConstView(data_).first(shape_.size()); }
    View x() noexcept { return View(data_).last(shape_.size()); }
    ConstView x() const noexcept { return ConstView(data_).last(shape_.size()); }

    /// Euclidean magnitude of the (y, x) pair at flat pixel index k.
    double magnitude(std::size_t k) const;

    View flat() noexcept { return data_; }
    ConstView flat() const noexcept { return data_; }
    const Vec& vec() const noexcept { return data_; }
    Vec release() && { return std::move(data_); }

    friend bool operator==(const DualField&, const DualField&) = default;

private:
    GridShape shape_;
    Vec data_;
};

/// Tomographic measurements, row-major by angle.
class Sinogram {
public:
    Sinogram() = default;
    Sinogram(std::size_t n_angles, std::size_t n_bins, double fill = 0.0);
    Sinogram(std::size_t n_angles, std::size_t n_bins, Vec data);

    std::size_t n_angles() const noexcept { return n_angles_; }
    std::size_t n_bins() const noexcept { return n_bins_; }
    std::size_t size() const noexcept { return data_.size(); }

    double& operator()(std::size_t a, std::size_t b) { return data_[a * n_bins_ + b]; }
    double operator()(std::size_t a, std::size_t b) const { return data_[a * n_bins_ + b]; }

    View flat() noexcept { return data_; }
    ConstView flat() const noexcept { return data_; }
    const Vec& vec() const noexcept { return data_; }
    Vec release() && { return std::move(data_); }

    friend bool operator==(const Sinogram&, const Sinogram&) = default;

private:
    std::size_t n_angles_ = 0;
    std::size_t n_bins_ = 0;
    Vec data_;
};

// Vector-space operations on flat views. Sums use pairwise accumulation.

double dot(ConstView a, ConstView b);
double norm2(ConstView a);
double sum(ConstView a);
Vec axpby(double alpha, ConstView x, double beta, ConstView y);

/// norm2(x - ref) / norm2(ref).
double rel_error(ConstView x, ConstView ref);

bool all_finite(ConstView a) noexcept;

// In-place helpers used by the solvers.

/// y += a * x
void add_scaled(View y, double a, ConstView x);
/// out = a * x + b * y; out may alias x or y.
void lincomb(View out, double a, ConstView x, double b, ConstView y);
void scale(View x, double a) noexcept;
void copy(ConstView src, View dst);
void fill(View x, double value) noexcept;

} // namespace imgskip
