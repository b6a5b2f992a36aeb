#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include "imgskip/errors.hpp"
#include "imgskip/harness.hpp"

namespace imgskip {

namespace {

constexpr const char* kHeader =
    "iter,elapsed_s,prox_count,inner_iters,rel_error,objective,prox_applied";

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

template <class T>
T parse_field(std::string_view s, std::size_t line_no) {
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw IoError("csv line " + std::to_string(line_no) + ": bad field '" + std::string(s) +
                      "'");
    return v;
}

} // namespace

std::string format_real(double v) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] =
        std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
    if (ec != std::errc()) throw std::logic_error("format_real: buffer too small");
    return std::string(buf.data(), ptr);
}

void write_csv(const IterationLog& log, std::ostream& out) {
    out << kHeader << '\n';
    for (const RunRecord& r : log.records()) {
        out << r.iter << ',' << format_real(r.elapsed_s) << ',' << r.prox_count << ','
            << r.inner_iter_count << ',';
        if (r.l2_rel_error) out << format_real(*r.l2_rel_error);
        out << ',';
        if (r.objective) out << format_real(*r.objective);
        out << ',' << (r.prox_applied ? 1 : 0) << '\n';
    }
}

void emit_csv(const IterationLog& log, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    write_csv(log, out);
    out.flush();
    if (!out) throw IoError("failed writing " + path.string());
}

IterationLog parse_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kHeader) throw IoError("csv: unexpected header");
    IterationLog log;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() != 7)
            throw IoError("csv line " + std::to_string(line_no) + ": expected 7 fields");
        RunRecord r;
        r.iter = parse_field<long>(f[0], line_no);
        r.elapsed_s = parse_field<double>(f[1], line_no);
        r.prox_count = parse_field<long>(f[2], line_no);
        r.inner_iter_count = parse_field<long>(f[3], line_no);
        if (!f[4].empty()) r.l2_rel_error = parse_field<double>(f[4], line_no);
        if (!f[5].empty()) r.objective = parse_field<double>(f[5], line_no);
        const int applied = parse_field<int>(f[6], line_no);
        if (applied != 0 && applied != 1)
            throw IoError("csv line " + std::to_string(line_no) + ": prox_applied must be 0 or 1");
        r.prox_applied = applied == 1;
        log.append(r);
    }
    return log;
}

IterationLog read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return parse_csv(in);
}

} // namespace imgskip
