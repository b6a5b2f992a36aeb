#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <random>

#include "imgskip/errors.hpp"
#include "imgskip/harness.hpp"
#include "imgskip/image_io.hpp"
#include "imgskip/phantoms.hpp"
#include "imgskip/skip.hpp"

namespace imgskip {

namespace {

bool is_denoise(Experiment e) {
    return e == Experiment::denoise_dual || e == Experiment::denoise_huber;
}

// Denoising experiments run the first-order methods on the dual; the
// primal-dual methods work on the primal image with A = identity.
bool runs_on_dual(const ExperimentConfig& cfg) {
    if (!is_denoise(cfg.experiment)) return false;
    switch (cfg.algorithm) {
    case Algorithm::pdhg:
    case Algorithm::pdhgskip1:
    case Algorithm::pdhgskip2: return false;
    default: return true;
    }
}

double dual_eps(const ExperimentConfig& cfg) {
    return cfg.experiment == Experiment::denoise_huber ? cfg.huber_eps : 0.0;
}

GridShape grid(const ExperimentData& data) { return data.truth.shape(); }

DualRofProblem dual_problem(const ExperimentConfig& cfg, const ExperimentData& data) {
    return build_dual_rof(Image(grid(data).height, grid(data).width, data.b), cfg.resolved_alpha(), dual_eps(cfg));
}

TvReconstructionProblem tv_problem(const ExperimentConfig& cfg, const ExperimentData& data,
                                   Splitting splitting, int inner) {
    return TvReconstructionProblem(data.A, data.b, grid(data), cfg.resolved_alpha(),
                                   cfg.experiment == Experiment::tomo, splitting, inner);
}

void fnv(std::uint64_t& h, std::string_view s) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    h ^= 0xff;  // field separator
    h *= 1099511628211ULL;
}

std::string hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

constexpr char kRefMagic[8] = {'I', 'S', 'K', 'P', 'R', 'E', 'F', '1'};

template <class T>
void put(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
void get(std::istream& in, T& v) {
    in.read(reinterpret_cast<char*>(&v), sizeof v);
}

} // namespace

// ---------------------------------------------------------------------------
// Data

ExperimentData build_data(const ExperimentConfig& cfg) {
    cfg.validate();
    Image truth;
    if (!cfg.image_path.empty()) {
        truth = read_pfm(cfg.image_path);
    } else if (cfg.resolved_phantom() == "disc") {
        if (cfg.height != cfg.width) throw ParameterError("disc phantom needs a square size");
        truth = gen_disc_phantom(cfg.height);
    } else {
        truth = gen_shapes_phantom(cfg.height, cfg.width);
    }
    const GridShape g = truth.shape();
    const double noise = cfg.resolved_noise();

    switch (cfg.experiment) {
    case Experiment::denoise_dual:
    case Experiment::denoise_huber: {
        LinearMap A = identity_map(ElementShape::image(g));
        Vec b = add_noise(truth.flat(), noise, cfg.noise_seed);
        return {std::move(truth), std::move(b), std::move(A)};
    }
    case Experiment::deblur: {
        LinearMap A = blur_map(g, BlurKernel::gaussian(cfg.blur_size, cfg.blur_sigma));
        Vec b = add_noise(A.forward(truth.flat()), noise, cfg.noise_seed);
        return {std::move(truth), std::move(b), std::move(A)};
    }
    case Experiment::tomo: {
        if (g.height != g.width) throw ParameterError("tomography needs a square image");
        LinearMap A =
            radon_map(RadonGeometry::uniform(g.height, cfg.n_angles, cfg.resolved_bins()));
        Vec b = add_noise(A.forward(truth.flat()), noise, cfg.noise_seed);
        return {std::move(truth), std::move(b), std::move(A)};
    }
    }
    throw ParameterError("unknown experiment");
}

std::uint64_t problem_hash(const ExperimentConfig& cfg) {
    std::uint64_t h = 1469598103934665603ULL;
    fnv(h, "imgskip-ref-1");
    fnv(h, to_string(cfg.experiment));
    if (!cfg.image_path.empty()) {
        fnv(h, "file");
        fnv(h, std::filesystem::absolute(cfg.image_path).string());
        std::error_code ec;
        const auto t = std::filesystem::last_write_time(cfg.image_path, ec);
        if (!ec) fnv(h, std::to_string(t.time_since_epoch().count()));
    } else {
        fnv(h, cfg.resolved_phantom());
        fnv(h, std::to_string(cfg.height) + "x" + std::to_string(cfg.width));
    }
    fnv(h, format_real(cfg.resolved_alpha()));
    fnv(h, format_real(cfg.resolved_noise()));
    fnv(h, std::to_string(cfg.noise_seed));
    switch (cfg.experiment) {
    case Experiment::denoise_huber: fnv(h, format_real(cfg.huber_eps)); break;
    case Experiment::deblur:
        fnv(h, std::to_string(cfg.blur_size));
        fnv(h, format_real(cfg.blur_sigma));
        break;
    case Experiment::tomo:
        fnv(h, std::to_string(cfg.n_angles));
        fnv(h, std::to_string(cfg.resolved_bins()));
        break;
    default: break;
    }
    fnv(h, std::to_string(cfg.resolved_ref_iters()));
    return h;
}

// ---------------------------------------------------------------------------
// Reference

ReferenceSolution solve_reference(const ExperimentConfig& cfg, const ExperimentData& data) {
    const long total = cfg.resolved_ref_iters();
    const long half = total / 2;
    ReferenceSolution ref;
    ref.hash = problem_hash(cfg);
    ref.iterations = 2 * half;
    Vec u_half;
    if (is_denoise(cfg.experiment)) {
        ref.method = "aprojgd-dual";
        const DualRofProblem dp = dual_problem(cfg, data);
        const SmoothProblem sp = dp.smooth();
        const ProxFn proj = dp.projector();
        const double gamma = 1.0 / dp.lipschitz;
        auto first = run_aprojgd(sp, proj, Vec(dp.dual_size(), 0.0), gamma, half);
        auto second = run_aprojgd(sp, proj, first.x, gamma, half);
        u_half.resize(data.b.size());
        ref.u_star.resize(data.b.size());
        primal_from_dual(first.x, dp.b, u_half);
        primal_from_dual(second.x, dp.b, ref.u_star);
    } else {
        ref.method = "pdhg-preconditioned-explicit";
        auto prob = tv_problem(cfg, data, Splitting::explicit_, 1);
        const SaddleProblem sp = prob.saddle_problem();
        auto first = run_pdhg_preconditioned(sp, half);
        u_half = first.x;
        auto second = run_pdhg_preconditioned(sp, half, {}, std::move(first.x),
                                              std::move(first.y));
        ref.u_star = std::move(second.x);
    }
    ref.self_consistency = rel_error(u_half, ref.u_star);
    if (!(ref.self_consistency <= kReferenceTolerance))
        throw ReferenceRejected(ref.self_consistency, kReferenceTolerance);
    return ref;
}

std::filesystem::path default_cache_dir(const ExperimentConfig& cfg) {
    if (!cfg.cache_dir.empty()) return cfg.cache_dir;
    if (const char* env = std::getenv("IMGSKIP_CACHE"); env && *env) return env;
    return ".imgskip-cache";
}

void save_reference(const std::filesystem::path& path, const ReferenceSolution& ref) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    // Write to a sibling and rename so readers never see a partial file.
    const auto tmp = std::filesystem::path(path.string() + ".tmp" + hex(std::random_device{}()));
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot write reference " + tmp.string());
        out.write(kRefMagic, sizeof kRefMagic);
        put(out, ref.hash);
        put(out, static_cast<std::int64_t>(ref.iterations));
        put(out, ref.self_consistency);
        put(out, static_cast<std::uint64_t>(ref.method.size()));
        out.write(ref.method.data(), static_cast<std::streamsize>(ref.method.size()));
        put(out, static_cast<std::uint64_t>(ref.u_star.size()));
        out.write(reinterpret_cast<const char*>(ref.u_star.data()),
                  static_cast<std::streamsize>(ref.u_star.size() * sizeof(double)));
        if (!out) throw IoError("failed writing reference " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot move reference into place at " + path.string());
}

ReferenceSolution load_reference(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open reference " + path.string());
    char magic[sizeof kRefMagic];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kRefMagic, sizeof magic) != 0)
        throw IoError(path.string() + ": not a reference file");
    ReferenceSolution ref;
    std::int64_t iters = 0;
    std::uint64_t len = 0;
    get(in, ref.hash);
    get(in, iters);
    get(in, ref.self_consistency);
    get(in, len);
    if (!in || len > 4096) throw IoError(path.string() + ": corrupt header");
    ref.iterations = iters;
    ref.method.resize(len);
    in.read(ref.method.data(), static_cast<std::streamsize>(len));
    std::uint64_t n = 0;
    get(in, n);
    if (!in || n > (std::uint64_t{1} << 32)) throw IoError(path.string() + ": corrupt header");
    ref.u_star.resize(n);
    in.read(reinterpret_cast<char*>(ref.u_star.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) throw IoError(path.string() + ": truncated");
    return ref;
}

ReferenceSolution compute_reference(const ExperimentConfig& cfg, const ExperimentData& data) {
    const std::uint64_t h = problem_hash(cfg);
    std::filesystem::path path;
    if (cfg.reference == "auto")
        path = default_cache_dir(cfg) / ("ref-" + hex(h) + ".bin");
    else
        path = cfg.reference;

    if (std::filesystem::exists(path)) {
        ReferenceSolution ref = load_reference(path);
        if (ref.hash != h || ref.u_star.size() != data.truth.size())
            throw IoError(path.string() + ": reference was computed for a different problem");
        if (!(ref.self_consistency <= kReferenceTolerance))
            throw ReferenceRejected(ref.self_consistency, kReferenceTolerance);
        return ref;
    }
    ReferenceSolution ref = solve_reference(cfg, data);
    save_reference(path, ref);
    return ref;
}

ReferenceSolution compute_reference(const ExperimentConfig& cfg) {
    return compute_reference(cfg, build_data(cfg));
}

// ---------------------------------------------------------------------------
// Runs

Vec primal_image(const ExperimentConfig& cfg, const ExperimentData& data, ConstView x) {
    if (!runs_on_dual(cfg)) return Vec(x.begin(), x.end());
    Vec u(data.b.size());
    primal_from_dual(x, Image(grid(data).height, grid(data).width, data.b), u);
    return u;
}

double experiment_objective(const ExperimentConfig& cfg, const ExperimentData& data,
                            ConstView x) {
    if (runs_on_dual(cfg)) return dual_problem(cfg, data).objective(x);
    return objective_tv(x, tv_problem(cfg, data, Splitting::explicit_, 1));
}

SolverResult run_algorithm(const ExperimentConfig& cfg, const ExperimentData& data, long iters,
                           const Monitor& monitor) {
    cfg.validate();
    const SkipConfig skip{cfg.resolved_p(), cfg.seed};

    if (runs_on_dual(cfg)) {
        const DualRofProblem dp = dual_problem(cfg, data);
        const double gamma = cfg.gamma.value_or(1.0 / dp.lipschitz);
        Vec q0(dp.dual_size(), 0.0);
        switch (cfg.algorithm) {
        case Algorithm::gd: return run_gd(dp.smooth(), std::move(q0), gamma, iters, monitor);
        case Algorithm::pgd:
        case Algorithm::projgd:
            return run_pgd(dp.prox_problem(), std::move(q0), gamma, iters, monitor);
        case Algorithm::fista:
        case Algorithm::aprojgd:
            return run_aprojgd(dp.smooth(), dp.projector(), std::move(q0), gamma, iters, monitor);
        case Algorithm::proxskip:
            return run_proxskip(dp.prox_problem(), std::move(q0), {}, gamma, skip, iters, monitor);
        default: break;
        }
        throw ParameterError("unsupported algorithm for the dual problem");
    }

    if (cfg.experiment == Experiment::denoise_huber)
        throw ParameterError("denoise-huber is solved on the dual only; use a gradient-type algorithm");

    const GridShape g = grid(data);
    Vec x0(g.size(), 0.0);
    switch (cfg.algorithm) {
    case Algorithm::projgd:
    case Algorithm::aprojgd:
        throw ParameterError(std::string(to_string(cfg.algorithm)) +
                             " applies to the denoising duals only");
    case Algorithm::gd:
    case Algorithm::pgd:
    case Algorithm::fista:
    case Algorithm::proxskip: {
        if (cfg.splitting != Splitting::implicit)
            throw ParameterError("proximal-gradient methods need the implicit splitting");
        auto prob = tv_problem(cfg, data, Splitting::implicit, cfg.inner_iters);
        const ProxProblem pp = prob.prox_problem();
        const double gamma = cfg.gamma.value_or(1.0 / pp.smooth.lipschitz);
        if (cfg.algorithm == Algorithm::gd)
            return run_gd(pp.smooth, std::move(x0), gamma, iters, monitor);
        if (cfg.algorithm == Algorithm::pgd)
            return run_pgd(pp, std::move(x0), gamma, iters, monitor);
        if (cfg.algorithm == Algorithm::fista)
            return run_fista(pp, std::move(x0), gamma, iters, monitor);
        return run_proxskip(pp, std::move(x0), {}, gamma, skip, iters, monitor);
    }
    case Algorithm::pdhg:
    case Algorithm::pdhgskip1:
    case Algorithm::pdhgskip2: {
        auto prob = tv_problem(cfg, data, cfg.splitting, cfg.inner_iters);
        const SaddleProblem sp = prob.saddle_problem();
        const double norm = std::sqrt(sp.norm_K_sq);
        double sigma = cfg.sigma.value_or(1.0 / norm);
        double tau = cfg.tau.value_or(1.0 / (sigma * sp.norm_K_sq));
        if (cfg.tau && !cfg.sigma) sigma = 1.0 / (tau * sp.norm_K_sq);
        Vec y0(sp.K.range_size(), 0.0);
        if (cfg.algorithm == Algorithm::pdhg)
            return run_pdhg(sp, std::move(x0), std::move(y0), sigma, tau, iters, monitor);
        if (cfg.algorithm == Algorithm::pdhgskip1) {
            const double omega = cfg.omega.value_or(1.0 / skip.p - 1.0);
            return run_pdhgskip1(sp, std::move(x0), std::move(y0), sigma, tau, omega, skip,
                                 iters, monitor);
        }
        return run_pdhgskip2(sp, std::move(x0), std::move(y0), {}, sigma, tau, skip, iters,
                             monitor);
    }
    }
    throw ParameterError("unknown algorithm");
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const ExperimentData& data,
                                const ReferenceSolution& ref) {
    cfg.validate();
    if (ref.u_star.size() != data.truth.size())
        throw ShapeError("run_experiment: reference does not match the image size");
    const double tol = cfg.resolved_tol();
    const bool dual = runs_on_dual(cfg);

    // Objective evaluators built once; the monitor runs every iteration.
    std::optional<DualRofProblem> dp;
    std::optional<TvReconstructionProblem> tp;
    if (dual) dp = dual_problem(cfg, data);
    else tp = tv_problem(cfg, data, Splitting::explicit_, 1);
    Vec u(data.truth.size());

    bool reached = false;
    const Monitor monitor = [&](RunRecord& rec, ConstView x) {
        if (dual) primal_from_dual(x, dp->b, u);
        else copy(x, u);
        const double e = rel_error(u, ref.u_star);
        rec.l2_rel_error = e;
        rec.objective = dual ? dp->objective(x) : objective_tv(u, *tp);
        if (e < tol) reached = true;
        return reached;
    };

    ExperimentResult result;
    SolverResult logged = run_algorithm(cfg, data, cfg.resolved_iters(), monitor);
    result.log = std::move(logged.log);
    result.u = primal_image(cfg, data, logged.x);

    ExperimentSummary& s = result.summary;
    s.iterations = logged.iterations;
    s.reached_tol = reached;
    if (!result.log.empty()) {
        const RunRecord& last = result.log.back();
        s.prox_count = last.prox_count;
        s.inner_iter_count = last.inner_iter_count;
        s.final_rel_error = last.l2_rel_error.value_or(0.0);
        s.final_objective = last.objective.value_or(0.0);
    }

    // Timed repeats: same seed and length, no monitor, so the path is identical.
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(cfg.timing_repeats));
    for (int r = 0; r < cfg.timing_repeats; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        SolverResult timed = run_algorithm(cfg, data, s.iterations);
        const auto t1 = std::chrono::steady_clock::now();
        times.push_back(std::chrono::duration<double>(t1 - t0).count());
        if (timed.log.empty() || timed.log.back().prox_count != s.prox_count)
            throw std::logic_error("timed run diverged from the logged trajectory");
    }
    s.timing_repeats = cfg.timing_repeats;
    double mean = 0.0;
    for (double t : times) mean += t;
    mean /= static_cast<double>(times.size());
    double var = 0.0;
    for (double t : times) var += (t - mean) * (t - mean);
    s.mean_time_s = mean;
    s.std_time_s = times.size() > 1 ? std::sqrt(var / static_cast<double>(times.size() - 1)) : 0.0;
    return result;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    const ExperimentData data = build_data(cfg);
    const ReferenceSolution ref = compute_reference(cfg, data);
    return run_experiment(cfg, data, ref);
}

} // namespace imgskip
