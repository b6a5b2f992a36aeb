#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "imgskip/errors.hpp"
#include "imgskip/harness.hpp"
#include "imgskip/skip.hpp"

namespace imgskip {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string normalize_key(std::string_view key) {
    std::string k(trim(key));
    while (!k.empty() && k.front() == '-') k.erase(k.begin());
    std::replace(k.begin(), k.end(), '_', '-');
    std::transform(k.begin(), k.end(), k.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return k;
}

double parse_real(std::string_view key, std::string_view v) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out))
        throw ParameterError("config: '" + std::string(key) + "' expects a real, got '" +
                             std::string(v) + "'");
    return out;
}

template <class Int>
Int parse_int(std::string_view key, std::string_view v) {
    Int out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw ParameterError("config: '" + std::string(key) + "' expects an integer, got '" +
                             std::string(v) + "'");
    return out;
}

void parse_size(std::string_view v, ExperimentConfig& cfg) {
    const auto x = v.find_first_of("xX");
    if (x == std::string_view::npos) throw ParameterError("config: size must look like HxW");
    cfg.height = parse_int<std::size_t>("size", trim(v.substr(0, x)));
    cfg.width = parse_int<std::size_t>("size", trim(v.substr(x + 1)));
}

} // namespace

Experiment parse_experiment(std::string_view name) {
    if (name == "denoise-dual") return Experiment::denoise_dual;
    if (name == "denoise-huber") return Experiment::denoise_huber;
    if (name == "deblur") return Experiment::deblur;
    if (name == "tomo") return Experiment::tomo;
    throw ParameterError("unknown experiment '" + std::string(name) + "'");
}

Algorithm parse_algorithm(std::string_view name) {
    static constexpr Algorithm all[] = {Algorithm::gd,        Algorithm::pgd,
                                        Algorithm::fista,     Algorithm::projgd,
                                        Algorithm::aprojgd,   Algorithm::proxskip,
                                        Algorithm::pdhg,      Algorithm::pdhgskip1,
                                        Algorithm::pdhgskip2};
    for (Algorithm a : all)
        if (to_string(a) == name) return a;
    throw ParameterError("unknown algorithm '" + std::string(name) + "'");
}

std::string_view to_string(Experiment e) noexcept {
    switch (e) {
    case Experiment::denoise_dual: return "denoise-dual";
    case Experiment::denoise_huber: return "denoise-huber";
    case Experiment::deblur: return "deblur";
    case Experiment::tomo: return "tomo";
    }
    return "?";
}

std::string_view to_string(Algorithm a) noexcept {
    switch (a) {
    case Algorithm::gd: return "gd";
    case Algorithm::pgd: return "pgd";
    case Algorithm::fista: return "fista";
    case Algorithm::projgd: return "projgd";
    case Algorithm::aprojgd: return "aprojgd";
    case Algorithm::proxskip: return "proxskip";
    case Algorithm::pdhg: return "pdhg";
    case Algorithm::pdhgskip1: return "pdhgskip1";
    case Algorithm::pdhgskip2: return "pdhgskip2";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Defaults

double ExperimentConfig::resolved_alpha() const {
    if (alpha) return *alpha;
    switch (experiment) {
    case Experiment::denoise_dual: return 0.5;
    case Experiment::denoise_huber: return 0.55;
    case Experiment::deblur: return 0.01;
    case Experiment::tomo: return 0.5;
    }
    return 0.5;
}

double ExperimentConfig::resolved_noise() const {
    if (noise_sigma) return *noise_sigma;
    switch (experiment) {
    case Experiment::denoise_dual:
    case Experiment::denoise_huber: return 0.05;
    case Experiment::deblur: return 0.01;
    case Experiment::tomo: return 0.5;
    }
    return 0.0;
}

double ExperimentConfig::resolved_p() const {
    if (p) return *p;
    switch (experiment) {
    case Experiment::denoise_dual: return 0.1;
    case Experiment::denoise_huber: {
        const double a = resolved_alpha();
        const double mu = huber_eps / a;
        return optimal_probability(mu, 8.0 + mu);
    }
    case Experiment::deblur: return 0.5;
    case Experiment::tomo: return 0.3;
    }
    return 1.0;
}

long ExperimentConfig::resolved_iters() const {
    if (outer_iters) return *outer_iters;
    switch (experiment) {
    case Experiment::denoise_dual: return 20000;
    case Experiment::denoise_huber: return 5000;
    case Experiment::deblur:
    case Experiment::tomo: return 3000;
    }
    return 1000;
}

double ExperimentConfig::resolved_tol() const {
    if (tol) return *tol;
    switch (experiment) {
    case Experiment::denoise_dual:
    case Experiment::denoise_huber: return 1e-12;
    case Experiment::deblur:
    case Experiment::tomo: return 1e-5;
    }
    return 1e-5;
}

long ExperimentConfig::resolved_ref_iters() const {
    if (ref_iters) return *ref_iters;
    long base = 0;
    switch (experiment) {
    case Experiment::denoise_dual: base = 100000; break;
    case Experiment::denoise_huber: base = 20000; break;
    case Experiment::deblur: base = 120000; break;
    case Experiment::tomo: base = 60000; break;
    }
    const double scale =
        std::max(1.0, std::sqrt(static_cast<double>(height * width) / (64.0 * 64.0)));
    const long total = static_cast<long>(std::ceil(base * scale));
    return total + (total % 2);
}

std::size_t ExperimentConfig::resolved_bins() const {
    if (n_bins) return *n_bins;
    const std::size_t side = std::max(height, width);
    return std::max<std::size_t>(1, 2 * ((3 * side) / 4) - 1);
}

std::string ExperimentConfig::resolved_phantom() const {
    if (!phantom.empty()) return phantom;
    return experiment == Experiment::tomo ? "disc" : "shapes";
}

void ExperimentConfig::validate() const {
    if (height < 16 || width < 16) throw ParameterError("config: size must be at least 16x16");
    if (experiment == Experiment::tomo && height != width)
        throw ParameterError("config: tomography needs a square image");
    if (!(resolved_alpha() > 0.0)) throw ParameterError("config: alpha must be positive");
    if (!(resolved_noise() >= 0.0)) throw ParameterError("config: noise must be nonnegative");
    if (experiment == Experiment::denoise_huber && !(huber_eps > 0.0))
        throw ParameterError("config: huber-eps must be positive");
    const double prob = resolved_p();
    if (!(prob > 0.0 && prob <= 1.0)) throw ParameterError("config: p must lie in (0, 1]");
    if (!(resolved_tol() > 0.0)) throw ParameterError("config: tol must be positive");
    if (timing_repeats < 1) throw ParameterError("config: repeats must be at least 1");
    if (resolved_iters() < 1) throw ParameterError("config: iters must be at least 1");
    if (inner_iters < 1) throw ParameterError("config: inner-iters must be at least 1");
    if (resolved_ref_iters() < 2) throw ParameterError("config: ref-iters must be at least 2");
    if (gamma && !(*gamma > 0.0)) throw ParameterError("config: gamma must be positive");
    if (sigma && !(*sigma > 0.0)) throw ParameterError("config: sigma must be positive");
    if (tau && !(*tau > 0.0)) throw ParameterError("config: tau must be positive");
    if (omega && !(*omega >= 0.0)) throw ParameterError("config: omega must be nonnegative");
    const auto ph = resolved_phantom();
    if (image_path.empty() && ph != "shapes" && ph != "disc")
        throw ParameterError("config: unknown phantom '" + ph + "'");
    if (experiment == Experiment::deblur && (blur_size % 2 == 0 || blur_size > std::min(height, width)))
        throw ParameterError("config: blur-size must be odd and fit the image");
    if (experiment == Experiment::tomo && n_angles < 1)
        throw ParameterError("config: angles must be at least 1");
}

// ---------------------------------------------------------------------------
// key = value

void apply_config_entry(ExperimentConfig& cfg, std::string_view raw_key, std::string_view raw) {
    const std::string key = normalize_key(raw_key);
    const std::string_view v = trim(raw);
    if (v.empty()) throw ParameterError("config: empty value for '" + key + "'");

    if (key == "experiment") cfg.experiment = parse_experiment(v);
    else if (key == "algo" || key == "algorithm") cfg.algorithm = parse_algorithm(v);
    else if (key == "p") cfg.p = parse_real(key, v);
    else if (key == "alpha") cfg.alpha = parse_real(key, v);
    else if (key == "huber-eps") cfg.huber_eps = parse_real(key, v);
    else if (key == "noise") cfg.noise_sigma = parse_real(key, v);
    else if (key == "noise-seed") cfg.noise_seed = parse_int<std::uint64_t>(key, v);
    else if (key == "iters") cfg.outer_iters = parse_int<long>(key, v);
    else if (key == "inner-iters") cfg.inner_iters = parse_int<int>(key, v);
    else if (key == "tol") cfg.tol = parse_real(key, v);
    else if (key == "seed") cfg.seed = parse_int<std::uint64_t>(key, v);
    else if (key == "repeats") cfg.timing_repeats = parse_int<int>(key, v);
    else if (key == "size") parse_size(v, cfg);
    else if (key == "phantom") cfg.phantom = std::string(v);
    else if (key == "image") cfg.image_path = std::string(v);
    else if (key == "blur-size") cfg.blur_size = parse_int<std::size_t>(key, v);
    else if (key == "blur-sigma") cfg.blur_sigma = parse_real(key, v);
    else if (key == "angles") cfg.n_angles = parse_int<std::size_t>(key, v);
    else if (key == "bins") cfg.n_bins = parse_int<std::size_t>(key, v);
    else if (key == "gamma") cfg.gamma = parse_real(key, v);
    else if (key == "sigma") cfg.sigma = parse_real(key, v);
    else if (key == "tau") cfg.tau = parse_real(key, v);
    else if (key == "omega") cfg.omega = parse_real(key, v);
    else if (key == "splitting") {
        if (v == "implicit") cfg.splitting = Splitting::implicit;
        else if (v == "explicit") cfg.splitting = Splitting::explicit_;
        else throw ParameterError("config: splitting must be implicit or explicit");
    }
    else if (key == "ref") cfg.reference = std::string(v);
    else if (key == "ref-iters") cfg.ref_iters = parse_int<long>(key, v);
    else if (key == "cache-dir") cfg.cache_dir = std::string(v);
    else if (key == "out") cfg.out_csv = std::string(v);
    else if (key == "dump-image") cfg.dump_image = std::string(v);
    else throw ParameterError("config: unknown key '" + key + "'");
}

void load_config_text(ExperimentConfig& cfg, std::string_view text) {
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParameterError("config line " + std::to_string(line_no) +
                                 ": expected key = value");
        try {
            apply_config_entry(cfg, line.substr(0, eq), line.substr(eq + 1));
        } catch (const ParameterError& e) {
            throw ParameterError("config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
}

void load_config_file(ExperimentConfig& cfg, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    load_config_text(cfg, ss.str());
}

} // namespace imgskip
