#include <cstdio>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "imgskip/errors.hpp"
#include "imgskip/harness.hpp"
#include "imgskip/image_io.hpp"

namespace {

constexpr int kExitDivergence = 2;
constexpr int kExitReference = 3;

// Flags that map one-to-one onto config keys.
const char* const kKeys[] = {
    "algo",      "p",         "alpha",      "iters",      "inner-iters", "tol",
    "seed",      "repeats",   "size",       "ref",        "out",         "dump-image",
    "huber-eps", "noise",     "noise-seed", "phantom",    "image",       "blur-size",
    "blur-sigma", "angles",   "bins",       "gamma",      "sigma",       "tau",
    "omega",     "splitting", "ref-iters",  "cache-dir",
};

void print_summary(const imgskip::ExperimentConfig& cfg, const imgskip::ReferenceSolution& ref,
                   const imgskip::ExperimentSummary& s) {
    using imgskip::format_real;
    std::cout << "experiment      " << imgskip::to_string(cfg.experiment) << '\n'
              << "algorithm       " << imgskip::to_string(cfg.algorithm) << '\n'
              << "p               " << format_real(cfg.resolved_p()) << '\n'
              << "reference       " << ref.method << ", " << ref.iterations
              << " iterations, self-consistency " << format_real(ref.self_consistency) << '\n'
              << "iterations      " << s.iterations << '\n'
              << "prox_count      " << s.prox_count << '\n'
              << "inner_iters     " << s.inner_iter_count << '\n'
              << "rel_error       " << format_real(s.final_rel_error) << '\n'
              << "objective       " << format_real(s.final_objective) << '\n'
              << "reached_tol     " << (s.reached_tol ? "yes" : "no") << '\n'
              << "time_s          " << format_real(s.mean_time_s) << " +- "
              << format_real(s.std_time_s) << " (" << s.timing_repeats << " runs)\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Proximal, primal-dual and prox-skipping solvers for imaging problems"};
    app.require_subcommand(1);

    std::map<std::string, std::string> values;
    for (const char* key : kKeys) app.add_option(std::string("--") + key, values[key]);
    std::string config_path;
    app.add_option("--config", config_path, "key = value file; flags override it")
        ->check(CLI::ExistingFile);

    for (const char* name : {"denoise-dual", "denoise-huber", "deblur", "tomo"})
        app.add_subcommand(name)->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        imgskip::ExperimentConfig cfg;
        if (!config_path.empty()) imgskip::load_config_file(cfg, config_path);
        cfg.experiment = imgskip::parse_experiment(app.get_subcommands().front()->get_name());
        for (const char* key : kKeys)
            if (app.count(std::string("--") + key) > 0)
                imgskip::apply_config_entry(cfg, key, values[key]);
        cfg.validate();

        const imgskip::ExperimentData data = imgskip::build_data(cfg);
        const imgskip::ReferenceSolution ref = imgskip::compute_reference(cfg, data);
        const imgskip::ExperimentResult result = imgskip::run_experiment(cfg, data, ref);

        if (!cfg.out_csv.empty()) imgskip::emit_csv(result.log, cfg.out_csv);
        if (!cfg.dump_image.empty()) {
            const auto g = data.truth.shape();
            imgskip::write_pfm(cfg.dump_image, imgskip::Image(g.height, g.width, result.u));
        }
        print_summary(cfg, ref, result.summary);
        return 0;
    } catch (const imgskip::DivergenceError& e) {
        std::cerr << "imgskip: " << e.what() << '\n';
        return kExitDivergence;
    } catch (const imgskip::ReferenceRejected& e) {
        std::cerr << "imgskip: " << e.what() << '\n';
        return kExitReference;
    } catch (const std::exception& e) {
        std::cerr << "imgskip: " << e.what() << '\n';
        return 1;
    }
}
