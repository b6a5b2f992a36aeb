#include <cmath>
#include <mutex>
#include <numeric>
#include <random>

#include "imgskip/errors.hpp"
#include "imgskip/operators.hpp"

namespace imgskip {

struct LinearMap::NormCache {
    std::mutex mutex;
    std::optional<double> value;
};

std::size_t SpaceShape::size() const noexcept {
    return std::accumulate(blocks.begin(), blocks.end(), std::size_t{0},
                           [](std::size_t acc, const ElementShape& b) { return acc + b.size(); });
}

LinearMap::LinearMap(std::string name, SpaceShape domain, SpaceShape range, Apply forward,
                     Apply adjoint, Apply abs_forward, Apply abs_adjoint)
    : name_(std::move(name)),
      domain_(std::move(domain)),
      range_(std::move(range)),
      domain_size_(domain_.size()),
      range_size_(range_.size()),
      forward_(std::move(forward)),
      adjoint_(std::move(adjoint)),
      abs_forward_(std::move(abs_forward)),
      abs_adjoint_(std::move(abs_adjoint)),
      norm_cache_(std::make_shared<NormCache>()) {
    if (!forward_ || !adjoint_) throw ParameterError(name_ + ": forward and adjoint are required");
    if (static_cast<bool>(abs_forward_) != static_cast<bool>(abs_adjoint_))
        throw ParameterError(name_ + ": |K| needs both directions");
}

void LinearMap::apply(ConstView x, View y) const {
    if (x.size() != domain_size_ || y.size() != range_size_)
        throw ShapeError(name_ + ": forward expects " + std::to_string(domain_size_) + " -> " +
                         std::to_string(range_size_));
    forward_(x, y);
}

void LinearMap::apply_adjoint(ConstView y, View x) const {
    if (y.size() != range_size_ || x.size() != domain_size_)
        throw ShapeError(name_ + ": adjoint expects " + std::to_string(range_size_) + " -> " +
                         std::to_string(domain_size_));
    adjoint_(y, x);
}

Vec LinearMap::forward(ConstView x) const {
    Vec y(range_size_);
    apply(x, y);
    return y;
}

Vec LinearMap::adjoint(ConstView y) const {
    Vec x(domain_size_);
    apply_adjoint(y, x);
    return x;
}

void LinearMap::apply_abs(ConstView x, View y) const {
    if (!has_abs()) throw ParameterError(name_ + ": no |K| action available");
    if (x.size() != domain_size_ || y.size() != range_size_)
        throw ShapeError(name_ + ": |K| size mismatch");
    abs_forward_(x, y);
}

void LinearMap::apply_abs_adjoint(ConstView y, View x) const {
    if (!has_abs()) throw ParameterError(name_ + ": no |K| action available");
    if (y.size() != range_size_ || x.size() != domain_size_)
        throw ShapeError(name_ + ": |K|^T size mismatch");
    abs_adjoint_(y, x);
}

Vec LinearMap::abs_row_sums() const {
    const Vec ones(domain_size_, 1.0);
    Vec out(range_size_);
    apply_abs(ones, out);
    return out;
}

Vec LinearMap::abs_col_sums() const {
    const Vec ones(range_size_, 1.0);
    Vec out(domain_size_);
    apply_abs_adjoint(ones, out);
    return out;
}

std::optional<double> LinearMap::norm_sq_estimate() const {
    std::lock_guard lock(norm_cache_->mutex);
    return norm_cache_->value;
}

double LinearMap::norm_sq(int iters, std::uint64_t seed) const {
    std::lock_guard lock(norm_cache_->mutex);
    if (!norm_cache_->value) norm_cache_->value = kNormSafety * power_method(*this, iters, seed);
    return *norm_cache_->value;
}

LinearMap& LinearMap::set_norm_sq(double value) {
    if (!(value >= 0.0)) throw ParameterError(name_ + ": norm estimate must be nonnegative");
    // A fresh cache so that copies made earlier keep their own value.
    norm_cache_ = std::make_shared<NormCache>();
    norm_cache_->value = value;
    return *this;
}

double power_method(const LinearMap& op, int iters, std::uint64_t seed) {
    if (iters < 1) throw ParameterError("power_method: iters must be >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Vec x(op.domain_size());
    for (double& v : x) v = normal(rng);
    Vec kx(op.range_size());
    Vec ktkx(op.domain_size());

    double estimate = 0.0;
    for (int it = 0; it < iters; ++it) {
        const double nx = norm2(x);
        if (nx == 0.0) return 0.0;
        scale(x, 1.0 / nx);
        op.apply(x, kx);
        op.apply_adjoint(kx, ktkx);
        estimate = dot(kx, kx);
        const double ny = norm2(ktkx);
        if (ny == 0.0) return 0.0;
        x.swap(ktkx);
    }
    return estimate;
}

LinearMap identity_map(SpaceShape space) {
    auto copy_fn = [](ConstView in, View out) { copy(in, out); };
    LinearMap map("identity", space, space, copy_fn, copy_fn, copy_fn, copy_fn);
    map.set_norm_sq(1.0);
    return map;
}

LinearMap diagonal_map(Vec diagonal) {
    const auto d = std::make_shared<const Vec>(std::move(diagonal));
    const auto shape = ElementShape::vector(d->size());
    auto mul = [d](ConstView in, View out) {
        for (std::size_t k = 0; k < in.size(); ++k) out[k] = (*d)[k] * in[k];
    };
    auto abs_mul = [d](ConstView in, View out) {
        for (std::size_t k = 0; k < in.size(); ++k) out[k] = std::abs((*d)[k]) * in[k];
    };
    return LinearMap("diagonal", shape, shape, mul, mul, abs_mul, abs_mul);
}

LinearMap zero_map(SpaceShape domain, SpaceShape range) {
    auto zero = [](ConstView, View out) { fill(out, 0.0); };
    LinearMap map("zero", std::move(domain), std::move(range), zero, zero, zero, zero);
    map.set_norm_sq(0.0);
    return map;
}

LinearMap block_stack(const LinearMap& a, const LinearMap& d) {
    if (!(a.domain() == d.domain()))
        throw ShapeError("block_stack: '" + a.name() + "' and '" + d.name() +
                         "' have different domains");
    std::vector<ElementShape> blocks = a.range().blocks;
    blocks.insert(blocks.end(), d.range().blocks.begin(), d.range().blocks.end());
    const std::size_t na = a.range_size();

    auto forward = [a, d, na](ConstView x, View y) {
        a.apply(x, y.first(na));
        d.apply(x, y.subspan(na));
    };
    auto adjoint = [a, d, na](ConstView y, View x) {
        a.apply_adjoint(y.first(na), x);
        Vec tmp(x.size());
        d.apply_adjoint(y.subspan(na), tmp);
        add_scaled(x, 1.0, tmp);
    };
    LinearMap::Apply abs_forward, abs_adjoint;
    if (a.has_abs() && d.has_abs()) {
        abs_forward = [a, d, na](ConstView x, View y) {
            a.apply_abs(x, y.first(na));
            d.apply_abs(x, y.subspan(na));
        };
        abs_adjoint = [a, d, na](ConstView y, View x) {
            a.apply_abs_adjoint(y.first(na), x);
            Vec tmp(x.size());
            d.apply_abs_adjoint(y.subspan(na), tmp);
            add_scaled(x, 1.0, tmp);
        };
    }
    return LinearMap("[" + a.name() + "; " + d.name() + "]", a.domain(), SpaceShape(blocks),
                     forward, adjoint, abs_forward, abs_adjoint);
}

} // namespace imgskip
