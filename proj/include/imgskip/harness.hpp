#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "imgskip/problems.hpp"
#include "imgskip/solvers.hpp"
#include "imgskip/tensor.hpp"

namespace imgskip {

enum class Experiment { denoise_dual, denoise_huber, deblur, tomo };
enum class Algorithm { gd, pgd, fista, projgd, aprojgd, proxskip, pdhg, pdhgskip1, pdhgskip2 };

Experiment parse_experiment(std::string_view name);
Algorithm parse_algorithm(std::string_view name);
std::string_view to_string(Experiment e) noexcept;
std::string_view to_string(Algorithm a) noexcept;

/// Everything needed to rebuild one experiment run. Fields left unset take
/// per-experiment defaults when the problem is built.
struct ExperimentConfig {
    Experiment experiment = Experiment::denoise_dual;

    // data
    std::string phantom;                 // "shapes" or "disc"; empty = experiment default
    std::filesystem::path image_path;    // PFM ground truth, overrides the phantom
    std::size_t height = 64;
    std::size_t width = 64;
    std::optional<double> alpha;
    double huber_eps = 0.1;              // denoise-huber only
    std::optional<double> noise_sigma;
    std::uint64_t noise_seed = 1;
    std::size_t blur_size = 11;
    double blur_sigma = 2.0;
    std::size_t n_angles = 45;
    std::optional<std::size_t> n_bins;   // default: 2 floor(0.75 side) - 1

    // solver
    Algorithm algorithm = Algorithm::proxskip;
    std::optional<double> p;
    std::optional<double> gamma;
    std::optional<double> sigma;
    std::optional<double> tau;
    std::optional<double> omega;        // PDHGSkip-1; default 1/p - 1
    Splitting splitting = Splitting::implicit;
    std::optional<long> outer_iters;
    int inner_iters = 100;
    std::optional<double> tol;
    std::uint64_t seed = 0;
    int timing_repeats = 10;

    // reference and outputs
    std::string reference = "auto";     // "auto" or a file path
    std::optional<long> ref_iters;
    std::filesystem::path cache_dir;    // empty: $IMGSKIP_CACHE or ./.imgskip-cache
    std::filesystem::path out_csv;
    std::filesystem::path dump_image;

    void validate() const;

    double resolved_alpha() const;
    double resolved_noise() const;
    double resolved_p() const;
    long resolved_iters() const;
    double resolved_tol() const;
    long resolved_ref_iters() const;
    std::size_t resolved_bins() const;
    std::string resolved_phantom() const;
};

/// Sets one `key = value` entry. Keys mirror the long CLI flags; '_' and '-'
/// are interchangeable.
void apply_config_entry(ExperimentConfig& cfg, std::string_view key, std::string_view value);
/// Reads `key = value` lines; '#' starts a comment.
void load_config_file(ExperimentConfig& cfg, const std::filesystem::path& path);
void load_config_text(ExperimentConfig& cfg, std::string_view text);

/// Ground truth, measurements and forward model of an experiment.
struct ExperimentData {
    Image truth;
    Vec b;
    LinearMap A;  // identity for denoising
};

ExperimentData build_data(const ExperimentConfig& cfg);

/// FNV-1a over the fields that define the problem and its reference.
std::uint64_t problem_hash(const ExperimentConfig& cfg);

struct ReferenceSolution {
    Vec u_star;
    std::string method;
    long iterations = 0;
    double self_consistency = 0.0;
    std::uint64_t hash = 0;
};

constexpr double kReferenceTolerance = 1e-6;

/// Long-run solve: accelerated projected gradient on the dual for denoising,
/// diagonally preconditioned PDHG on the explicit splitting otherwise. The
/// budget is split in two halves and the outputs compared; a disagreement
/// above kReferenceTolerance throws ReferenceRejected.
ReferenceSolution solve_reference(const ExperimentConfig& cfg, const ExperimentData& data);
/// solve_reference behind the on-disk cache selected by cfg.reference.
ReferenceSolution compute_reference(const ExperimentConfig& cfg);
ReferenceSolution compute_reference(const ExperimentConfig& cfg, const ExperimentData& data);

void save_reference(const std::filesystem::path& path, const ReferenceSolution& ref);
ReferenceSolution load_reference(const std::filesystem::path& path);
std::filesystem::path default_cache_dir(const ExperimentConfig& cfg);

/// One solver run on prepared data. The monitor sees the solver's own iterate,
/// which for the dual denoising problems is the dual field q.
SolverResult run_algorithm(const ExperimentConfig& cfg, const ExperimentData& data, long iters,
                           const Monitor& monitor = {});

/// Primal image for an iterate of run_algorithm (u = b + div q on the duals).
Vec primal_image(const ExperimentConfig& cfg, const ExperimentData& data, ConstView x);
/// Objective logged for an iterate: the dual objective for the denoising
/// duals, 0.5 ||Au - b||^2 + alpha TV(u) otherwise.
double experiment_objective(const ExperimentConfig& cfg, const ExperimentData& data, ConstView x);

struct ExperimentSummary {
    long iterations = 0;
    long prox_count = 0;
    long inner_iter_count = 0;
    double final_rel_error = 0.0;
    double final_objective = 0.0;
    bool reached_tol = false;
    double mean_time_s = 0.0;
    double std_time_s = 0.0;
    int timing_repeats = 0;
};

struct ExperimentResult {
    IterationLog log;
    ExperimentSummary summary;
    Vec u;  // final primal image
};

/// Logged run (rel_error and objective every iteration, stop at tol) followed
/// by timing_repeats unmonitored runs of the same length.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const ExperimentData& data,
                                const ReferenceSolution& ref);
ExperimentResult run_experiment(const ExperimentConfig& cfg);

void write_csv(const IterationLog& log, std::ostream& out);
void emit_csv(const IterationLog& log, const std::filesystem::path& path);
IterationLog read_csv(const std::filesystem::path& path);
IterationLog parse_csv(std::istream& in);

/// 17 significant digits, '.' as decimal point, no grouping.
std::string format_real(double v);

} // namespace imgskip
