#pragma once

#include <filesystem>

#include "imgskip/tensor.hpp"

namespace imgskip {

// Portable float map: header "Pf <width> <height> -1.0", then little-endian
// float32 samples, row-major, top row first.
void write_pfm(const std::filesystem::path& path, const Image& image);
Image read_pfm(const std::filesystem::path& path);

// Binary 8-bit PGM, intensities linearly rescaled from [min, max] to [0, 255].
// A constant image maps to 0.
void write_pgm(const std::filesystem::path& path, const Image& image);

} // namespace imgskip
