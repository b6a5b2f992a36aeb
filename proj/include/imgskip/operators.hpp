#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "imgskip/tensor.hpp"

namespace imgskip {

/// Relative margin added to power-method norm estimates, which approach
/// ||K||^2 from below.
inline constexpr double kNormSafety = 1.01;

enum class ElementKind { vector, image, dual_field, sinogram };

/// Shape of one block of a (possibly stacked) vector space.
/// For images and dual fields rows/cols are height/width; for sinograms they
/// are angles/bins; plain vectors use rows = length, cols = 1.
struct ElementShape {
    ElementKind kind = ElementKind::vector;
    std::size_t rows = 0;
    std::size_t cols = 0;

    std::size_t size() const noexcept {
        return kind == ElementKind::dual_field ? 2 * rows * cols : rows * cols;
    }
    friend bool operator==(const ElementShape&, const ElementShape&) = default;

    static ElementShape vector(std::size_t n) { return {ElementKind::vector, n, 1}; }
    static ElementShape image(GridShape g) { return {ElementKind::image, g.height, g.width}; }
    static ElementShape dual(GridShape g) { return {ElementKind::dual_field, g.height, g.width}; }
    static ElementShape sinogram(std::size_t angles, std::size_t bins) {
        return {ElementKind::sinogram, angles, bins};
    }
};

/// Concatenation of blocks; a single block for ordinary maps.
struct SpaceShape {
    std::vector<ElementShape> blocks;

    SpaceShape() = default;
    SpaceShape(ElementShape single) : blocks{single} {}  // NOLINT(google-explicit-constructor)
    explicit SpaceShape(std::vector<ElementShape> b) : blocks(std::move(b)) {}

    std::size_t size() const noexcept;
    friend bool operator==(const SpaceShape&, const SpaceShape&) = default;
};

/// A linear operator with its exact adjoint, acting on flat buffers.
///
/// Optionally carries the action of the entrywise absolute value |K| and its
/// transpose; these give the row and column absolute sums used by diagonally
/// preconditioned primal-dual steps. Copies share the cached norm estimate.
class LinearMap {
public:
    using Apply = std::function<void(ConstView in, View out)>;

    LinearMap(std::string name, SpaceShape domain, SpaceShape range, Apply forward,
              Apply adjoint, Apply abs_forward = {}, Apply abs_adjoint = {});

    const std::string& name() const noexcept { return name_; }
    const SpaceShape& domain() const noexcept { return domain_; }
    const SpaceShape& range() const noexcept { return range_; }
    std::size_t domain_size() const noexcept { return domain_size_; }
    std::size_t range_size() const noexcept { return range_size_; }

    void apply(ConstView x, View y) const;
    void apply_adjoint(ConstView y, View x) const;
    Vec forward(ConstView x) const;
    Vec adjoint(ConstView y) const;

    bool has_abs() const noexcept { return static_cast<bool>(abs_forward_); }
    /// |K| x and |K|^T y. Require has_abs().
    void apply_abs(ConstView x, View y) const;
    void apply_abs_adjoint(ConstView y, View x) const;
    /// Row sums of |K|, i.e. |K| applied to ones. Requires has_abs().
    Vec abs_row_sums() const;
    /// Column sums of |K|, i.e. |K|^T applied to ones. Requires has_abs().
    Vec abs_col_sums() const;

    /// Upper estimate of ||K||^2 if one has been set or computed.
    std::optional<double> norm_sq_estimate() const;
    /// Returns the cached estimate. If absent, runs the power method once and
    /// caches its value inflated by kNormSafety so it bounds ||K||^2 from above.
    double norm_sq(int iters = 200, std::uint64_t seed = 0) const;
    LinearMap& set_norm_sq(double value);

private:
    struct NormCache;

    std::string name_;
    SpaceShape domain_;
    SpaceShape range_;
    std::size_t domain_size_;
    std::size_t range_size_;
    Apply forward_;
    Apply adjoint_;
    Apply abs_forward_;
    Apply abs_adjoint_;
    std::shared_ptr<NormCache> norm_cache_;
};

/// Estimate of ||op||^2 from the Rayleigh quotient of op^T op after `iters`
/// normalized power steps from a seeded Gaussian start. Returns 0 for a zero map.
double power_method(const LinearMap& op, int iters, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Finite differences with Neumann boundary and the matching divergence.

/// Forward differences; the last row (D_y) and last column (D_x) are zero.
DualField grad_forward(const Image& u);
/// div = -D^T.
Image divergence(const DualField& q);

void apply_gradient(ConstView u, GridShape shape, View q);
void apply_divergence(ConstView q, GridShape shape, View u);

LinearMap gradient_map(GridShape shape);
LinearMap divergence_map(GridShape shape);

// ---------------------------------------------------------------------------
// Circular convolution.

class BlurKernel {
public:
    /// Weights are row-major size x size, nonnegative and summing to 1.
    BlurKernel(std::size_t size, Vec weights);

    static BlurKernel identity(std::size_t size = 1);
    static BlurKernel box(std::size_t size);
    static BlurKernel gaussian(std::size_t size, double sigma);

    std::size_t size() const noexcept { return size_; }
    std::size_t radius() const noexcept { return size_ / 2; }
    double operator()(std::size_t a, std::size_t b) const { return weights_[a * size_ + b]; }
    ConstView weights() const noexcept { return weights_; }

private:
    std::size_t size_;
    Vec weights_;
};

Image blur_forward(const Image& u, const BlurKernel& k);
/// Circular correlation with k, the exact adjoint of blur_forward.
Image blur_adjoint(const Image& r, const BlurKernel& k);
LinearMap blur_map(GridShape shape, const BlurKernel& k);

// ---------------------------------------------------------------------------
// Parallel-beam Radon transform.

struct RadonGeometry {
    std::size_t image_side = 0;
    Vec angles;  // radians, strictly increasing in [0, pi)
    std::size_t n_bins = 0;
    double bin_spacing = 1.0;  // pixel units

    std::size_t n_angles() const noexcept { return angles.size(); }

    /// n_angles angles k*pi/n_angles.
    static RadonGeometry uniform(std::size_t image_side, std::size_t n_angles,
                                 std::size_t n_bins, double bin_spacing = 1.0);
    void validate() const;
};

/// Ray-driven projector: every ray is sampled at unit steps with bilinear
/// interpolation. The sampling weights are assembled once into a sparse
/// matrix so that the back-projection is its exact transpose.
class RadonProjector {
public:
    explicit RadonProjector(RadonGeometry geometry);

    const RadonGeometry& geometry() const noexcept { return geometry_; }
    std::size_t nnz() const noexcept { return values_.size(); }

    void forward(ConstView image, View sinogram) const;
    void adjoint(ConstView sinogram, View image) const;
    void abs_forward(ConstView image, View sinogram) const { forward(image, sinogram); }
    void abs_adjoint(ConstView sinogram, View image) const { adjoint(sinogram, image); }

private:
    RadonGeometry geometry_;
    std::vector<std::size_t> row_start_;
    std::vector<std::uint32_t> columns_;
    Vec values_;
};

Sinogram radon_forward(const Image& u, const RadonGeometry& g);
Image radon_adjoint(const Sinogram& s, const RadonGeometry& g);
LinearMap radon_map(std::shared_ptr<const RadonProjector> projector);
LinearMap radon_map(const RadonGeometry& g);

// ---------------------------------------------------------------------------
// Generic maps.

LinearMap identity_map(SpaceShape space);
LinearMap diagonal_map(Vec diagonal);
LinearMap zero_map(SpaceShape domain, SpaceShape range);

/// K = [a; d]: forward concatenates, adjoint sums the block adjoints.
LinearMap block_stack(const LinearMap& a, const LinearMap& d);

} // namespace imgskip
