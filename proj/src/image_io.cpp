#include "imgskip/image_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "imgskip/errors.hpp"

namespace imgskip {

namespace {

std::uint32_t to_little_endian(std::uint32_t v) {
    if constexpr (std::endian::native == std::endian::little) {
        return v;
    } else {
        return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
    }
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    return out;
}

} // namespace

void write_pfm(const std::filesystem::path& path, const Image& image) {
    auto out = open_out(path);
    out << "Pf\n" << image.width() << " " << image.height() << "\n-1.0\n";
    for (double v : image.flat()) {
        const auto f = static_cast<float>(v);
        const std::uint32_t bits = to_little_endian(std::bit_cast<std::uint32_t>(f));
        out.write(reinterpret_cast<const char*>(&bits), sizeof(bits));
    }
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

Image read_pfm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::string magic;
    std::size_t width = 0, height = 0;
    double scale = 0.0;
    in >> magic >> width >> height >> scale;
    if (!in || magic != "Pf" || width == 0 || height == 0)
        throw IoError("'" + path.string() + "' is not a single-channel PFM file");
    if (scale >= 0.0) throw IoError("'" + path.string() + "': big-endian PFM is not supported");
    in.get();  // single whitespace byte terminating the header

    Vec data(width * height);
    for (double& v : data) {
        std::uint32_t bits = 0;
        in.read(reinterpret_cast<char*>(&bits), sizeof(bits));
        if (!in) throw IoError("'" + path.string() + "': truncated sample data");
        v = static_cast<double>(std::bit_cast<float>(to_little_endian(bits)));
    }
    return Image(height, width, std::move(data));
}

void write_pgm(const std::filesystem::path& path, const Image& image) {
    const auto [lo_it, hi_it] = std::minmax_element(image.flat().begin(), image.flat().end());
    const double lo = *lo_it;
    const double range = *hi_it - lo;
    auto out = open_out(path);
    out << "P5\n" << image.width() << " " << image.height() << "\n255\n";
    for (double v : image.flat()) {
        const double t = range > 0.0 ? (v - lo) / range : 0.0;
        const auto byte = static_cast<unsigned char>(std::lround(std::clamp(t, 0.0, 1.0) * 255.0));
        out.put(static_cast<char>(byte));
    }
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

} // namespace imgskip
