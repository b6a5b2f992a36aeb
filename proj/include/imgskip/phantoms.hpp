#pragma once

#include <cstdint>

#include "imgskip/tensor.hpp"

namespace imgskip {

/// Piecewise-constant test image with values in [0, 1]: zero background, two
/// axis-aligned rectangles, a disc and a triangle at fixed fractions of the
/// frame. Deterministic; at least 16x16.
Image gen_shapes_phantom(std::size_t height, std::size_t width);

/// n x n nonnegative phantom of nested discs and an annulus inside the
/// inscribed circle, zero outside it. At least 16x16.
Image gen_disc_phantom(std::size_t n);

/// Adds i.i.d. N(0, sigma^2) noise drawn from a seeded generator.
Vec add_noise(ConstView u, double sigma, std::uint64_t seed);
Image add_noise(const Image& u, double sigma, std::uint64_t seed);
Sinogram add_noise(const Sinogram& s, double sigma, std::uint64_t seed);

} // namespace imgskip
