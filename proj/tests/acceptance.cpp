// Acceptance suite. `acceptance N` runs criterion N, `acceptance` runs all
// ten. Each prints one line "criterion N: PASS|FAIL <measurements>" and the
// exit status is nonzero if any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "imgskip/harness.hpp"
#include "imgskip/operators.hpp"
#include "imgskip/phantoms.hpp"
#include "imgskip/problems.hpp"
#include "imgskip/skip.hpp"
#include "test_util.hpp"

using namespace imgskip;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

constexpr long kNever = std::numeric_limits<long>::max();

std::string fmt_iter(long k) { return k == kNever ? "never" : std::to_string(k); }

ExperimentConfig base_config(Experiment e) {
    ExperimentConfig cfg;
    cfg.experiment = e;
    cfg.cache_dir = IMGSKIP_REF_CACHE;
    cfg.timing_repeats = 1;
    return cfg;
}

// Per-iteration rel_error against the reference plus the run's log.
struct Trace {
    std::vector<double> err;
    IterationLog log;
    long hit(double tol) const {
        for (std::size_t k = 0; k < err.size(); ++k)
            if (err[k] <= tol) return static_cast<long>(k) + 1;
        return kNever;
    }
    double best() const { return *std::min_element(err.begin(), err.end()); }
    // Counters at the first iteration reaching tol.
    const RunRecord& record_at(long k) const { return log[static_cast<std::size_t>(k - 1)]; }
};

Trace trace(const ExperimentConfig& cfg, const ExperimentData& data, const ReferenceSolution& ref, long iters,
            double stop_tol = 0.0, const Monitor& extra = {}) {
    Trace t;
    t.err.reserve(static_cast<std::size_t>(iters));
    SolverResult r = run_algorithm(cfg, data, iters, [&](RunRecord& rec, ConstView x) {
        const Vec u = primal_image(cfg, data, x);
        const double e = rel_error(u, ref.u_star);
        rec.l2_rel_error = e;
        t.err.push_back(e);
        if (extra) extra(rec, x);
        return e <= stop_tol;
    });
    t.log = std::move(r.log);
    return t;
}

// ---------------------------------------------------------------------------

double adjoint_mismatch(const LinearMap& K, std::uint64_t seed) {
    const Vec x = testutil::gaussian_vec(K.domain_size(), seed);
    const Vec y = testutil::gaussian_vec(K.range_size(), seed + 1000);
    const Vec kx = K.forward(x), kty = K.adjoint(y);
    const double lhs = dot(kx, y), rhs = dot(x, kty);
    return std::abs(lhs - rhs) / (norm2(kx) * norm2(y));
}

Outcome criterion1() {
    const GridShape g{64, 64};
    const BlurKernel kernel = BlurKernel::gaussian(11, 2.0);
    RadonGeometry geo;
    geo.image_side = 64;
    geo.n_bins = 95;
    for (int a = 0; a < 45; ++a) geo.angles.push_back(M_PI * a / 45.0);
    const std::vector<std::pair<std::string, LinearMap>> maps = {
        {"grad", gradient_map(g)},
        {"div", divergence_map(g)},
        {"blur", blur_map(g, kernel)},
        {"radon", radon_map(geo)},
        {"block", block_stack(blur_map(g, kernel), gradient_map(g))},
        {"block-radon", block_stack(radon_map(geo), gradient_map(g))},
    };
    double worst = 0.0;
    for (const auto& [name, K] : maps)
        for (std::uint64_t seed = 0; seed < 20; ++seed) worst = std::max(worst, adjoint_mismatch(K, seed));

    // div = -D^T against an assembled forward-difference matrix, integer data.
    long mismatches = 0;
    for (std::size_t h = 2; h <= 8; ++h) {
        for (std::size_t w = 2; w <= 8; ++w) {
            const std::size_t n = h * w;
            std::vector<double> D(2 * n * n, 0.0);  // (2n) x n
            for (std::size_t i = 0; i < h; ++i)
                for (std::size_t j = 0; j < w; ++j) {
                    const std::size_t k = i * w + j;
                    if (i + 1 < h) {
                        D[k * n + k + w] = 1.0;
                        D[k * n + k] = -1.0;
                    }
                    if (j + 1 < w) {
                        D[(n + k) * n + k + 1] = 1.0;
                        D[(n + k) * n + k] = -1.0;
                    }
                }
            const Vec qr = testutil::random_vec(2 * n, h * 31 + w, -50.0, 50.0);
            DualField q(h, w);
            for (std::size_t r = 0; r < 2 * n; ++r) q.flat()[r] = std::round(qr[r]);
            const Image div = divergence(q);
            for (std::size_t c = 0; c < n; ++c) {
                double s = 0.0;
                for (std::size_t r = 0; r < 2 * n; ++r) s -= D[r * n + c] * q.flat()[r];
                if (div.flat()[c] != s) ++mismatches;
            }
            const Vec ur = testutil::random_vec(n, h * 37 + w, -50.0, 50.0);
            Image u(h, w);
            for (std::size_t c = 0; c < n; ++c) u.flat()[c] = std::round(ur[c]);
            const DualField du = grad_forward(u);
            for (std::size_t r = 0; r < 2 * n; ++r) {
                double s = 0.0;
                for (std::size_t c = 0; c < n; ++c) s += D[r * n + c] * u.flat()[c];
                if (du.flat()[r] != s) ++mismatches;
            }
        }
    }
    return {worst <= 1e-10 && mismatches == 0,
            "worst adjoint mismatch " + fmt(worst) + " over " + std::to_string(maps.size()) +
                " maps x 20 pairs; assembled-matrix mismatches " + std::to_string(mismatches)};
}

Outcome criterion2() {
    ExperimentConfig cfg = base_config(Experiment::denoise_dual);
    cfg.height = cfg.width = 16;
    cfg.seed = 3;
    cfg.inner_iters = 10;
    const ExperimentData data = build_data(cfg);
    auto iterates = [&](Algorithm a, std::optional<double> p) {
        ExperimentConfig c = cfg;
        c.algorithm = a;
        c.p = p;
        std::vector<Vec> xs;
        run_algorithm(c, data, 200, [&](RunRecord&, ConstView x) {
            xs.emplace_back(x.begin(), x.end());
            return false;
        });
        return xs;
    };
    auto worst_gap = [](const std::vector<Vec>& a, const std::vector<Vec>& b) {
        if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
        double m = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, testutil::max_abs_diff(a[k], b[k]));
        return m;
    };
    const double d1 = worst_gap(iterates(Algorithm::proxskip, 1.0), iterates(Algorithm::projgd, std::nullopt));
    const double d2 = worst_gap(iterates(Algorithm::pdhgskip2, 1.0), iterates(Algorithm::pdhg, std::nullopt));
    return {d1 <= 1e-15 && d2 <= 1e-15,
            "max per-iterate gap over 200 iterations: proxskip vs projgd " + fmt(d1) + ", pdhgskip2 vs pdhg " +
                fmt(d2)};
}

Outcome criterion3() {
    ExperimentConfig cfg = base_config(Experiment::denoise_dual);
    cfg.alpha = 0.5;
    cfg.noise_sigma = 0.05;
    cfg.gamma = 1.0 / 8.0;
    const ExperimentData data = build_data(cfg);
    const ReferenceSolution ref = compute_reference(cfg, data);
    bool all_reach = true;
    std::vector<double> finals;
    std::ostringstream os;
    auto run = [&](const std::string& name, Algorithm a, std::optional<double> p) {
        ExperimentConfig c = cfg;
        c.algorithm = a;
        c.p = p;
        const Trace t = trace(c, data, ref, 20000);
        all_reach = all_reach && t.best() <= 1e-4;
        finals.push_back(t.err.back());
        os << name << " final " << fmt(t.err.back()) << "; ";
    };
    run("projgd", Algorithm::projgd, std::nullopt);
    for (double p : {0.01, 0.1, 0.3, 0.5}) run("proxskip p=" + fmt(p), Algorithm::proxskip, p);
    const double spread = *std::max_element(finals.begin(), finals.end()) /
                          *std::min_element(finals.begin(), finals.end());
    os << "spread x" << fmt(spread) << " (need all <= 1e-4, spread <= 10)";
    return {all_reach && spread <= 10.0, os.str()};
}

Outcome criterion4() {
    ExperimentConfig cfg = base_config(Experiment::denoise_huber);
    cfg.algorithm = Algorithm::proxskip;
    cfg.p = 0.04767;
    const ExperimentData data = build_data(cfg);
    long lo = kNever, hi = 0;
    double mean = 0.0;
    bool in_band = true;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        cfg.seed = seed;
        const long count = run_algorithm(cfg, data, 5000).log.back().prox_count;
        lo = std::min(lo, count);
        hi = std::max(hi, count);
        mean += count / 30.0;
        in_band = in_band && count >= 150 && count <= 330;
    }
    return {in_band && mean >= 225.0 && mean <= 252.0,
            "prox counts over 30 seeds in [" + std::to_string(lo) + ", " + std::to_string(hi) + "], mean " +
                fmt(mean) + " (need each in [150, 330], mean in [225, 252])"};
}

Outcome criterion5() {
    ExperimentConfig cfg = base_config(Experiment::denoise_huber);
    cfg.alpha = 0.55;
    cfg.huber_eps = 0.1;
    const double mu = 0.1 / 0.55, L = 8.0 + mu;
    const ExperimentData data = build_data(cfg);
    const ReferenceSolution ref = compute_reference(cfg, data);

    ExperimentConfig ps = cfg;
    ps.algorithm = Algorithm::proxskip;
    ps.p = optimal_probability(mu, L);
    const Trace t = trace(ps, data, ref, 5000, 1e-6);
    // least-squares slope of log10(rel_error) against the iteration index
    double sk = 0, se = 0, skk = 0, ske = 0;
    const double n = static_cast<double>(t.err.size());
    for (std::size_t k = 0; k < t.err.size(); ++k) {
        const double x = static_cast<double>(k + 1), y = std::log10(t.err[k]);
        sk += x;
        se += y;
        skk += x * x;
        ske += x * y;
    }
    const double slope = (n * ske - sk * se) / (n * skk - sk * sk);
    const long hit_ps = t.hit(1e-6);

    ExperimentConfig acc = cfg, plain = cfg;
    acc.algorithm = Algorithm::aprojgd;
    plain.algorithm = Algorithm::projgd;
    const long hit_acc = trace(acc, data, ref, 20000, 1e-6).hit(1e-6);
    const long hit_plain = trace(plain, data, ref, 20000, 1e-6).hit(1e-6);

    return {slope < 0.0 && hit_ps <= 5000 && hit_acc < hit_plain,
            "proxskip p=" + fmt(*ps.p) + ": slope " + fmt(slope) + " log10/iter, 1e-6 at " + fmt_iter(hit_ps) +
                "; aprojgd 1e-6 at " + fmt_iter(hit_acc) + ", projgd at " + fmt_iter(hit_plain)};
}

ExperimentConfig deblur_config(Algorithm a, std::optional<double> p, int inner) {
    ExperimentConfig cfg = base_config(Experiment::deblur);
    cfg.algorithm = a;
    cfg.p = p;
    cfg.inner_iters = inner;
    cfg.seed = 0;
    return cfg;
}

Outcome criterion6() {
    const ExperimentConfig base = deblur_config(Algorithm::fista, std::nullopt, 10);
    const ExperimentData data = build_data(base);
    const ReferenceSolution ref = compute_reference(base, data);
    const double tol = 1e-5;

    const Trace f10 = trace(deblur_config(Algorithm::fista, std::nullopt, 10), data, ref, 3000, tol);
    const Trace s10 = trace(deblur_config(Algorithm::proxskip, 0.5, 10), data, ref, 3000, tol);
    const Trace f100 = trace(deblur_config(Algorithm::fista, std::nullopt, 100), data, ref, 3000, tol);
    const Trace s100 = trace(deblur_config(Algorithm::proxskip, 0.5, 100), data, ref, 3000, tol);
    const bool pass = f10.best() > s10.best() && f100.hit(tol) != kNever && s100.hit(tol) != kNever;
    return {pass, "inner 10: fista best " + fmt(f10.best()) + " vs proxskip(0.5) best " + fmt(s10.best()) +
                      "; inner 100: fista 1e-5 at " + fmt_iter(f100.hit(tol)) + ", proxskip(0.5) at " +
                      fmt_iter(s100.hit(tol))};
}

Outcome criterion7() {
    const ExperimentConfig base = deblur_config(Algorithm::fista, std::nullopt, 100);
    const ExperimentData data = build_data(base);
    const ReferenceSolution ref = compute_reference(base, data);
    const double tol = 1e-5;
    const Trace f = trace(base, data, ref, 3000, tol);
    // Skipped iterations cost no inner work, so the outer budget is wider.
    const Trace s = trace(deblur_config(Algorithm::proxskip, 0.05, 100), data, ref, 30000, tol);
    const long hf = f.hit(tol), hs = s.hit(tol);
    if (hf == kNever || hs == kNever)
        return {false, "1e-5 not reached: fista " + fmt_iter(hf) + ", proxskip(0.05) " + fmt_iter(hs)};
    const double inner_f = static_cast<double>(f.record_at(hf).inner_iter_count);
    const double inner_s = static_cast<double>(s.record_at(hs).inner_iter_count);
    const double ratio = inner_s / inner_f;
    return {ratio <= 0.15, "inner iterations to 1e-5: proxskip(0.05) " + fmt(inner_s) + " (" +
                               std::to_string(s.record_at(hs).prox_count) + " prox, " + std::to_string(hs) +
                               " iters) vs fista " + fmt(inner_f) + " (" + std::to_string(hf) +
                               " iters); ratio " + fmt(ratio) + " (need <= 0.15)"};
}

Outcome criterion8() {
    ExperimentConfig cfg = base_config(Experiment::tomo);
    cfg.p = 0.3;
    cfg.inner_iters = 50;
    const ExperimentData data = build_data(cfg);
    const ReferenceSolution ref = compute_reference(cfg, data);

    ExperimentConfig c2 = cfg, c1 = cfg;
    c2.algorithm = Algorithm::pdhgskip2;
    c1.algorithm = Algorithm::pdhgskip1;
    c1.omega = 1.0 / 0.3 - 1.0;
    const long hit2 = trace(c2, data, ref, 3000, 1e-4).hit(1e-4);

    // maximal runs of consecutive iterations whose x equals the previous one
    Vec prev;
    long runs = 0;
    bool in_run = false;
    const Trace t1 = trace(c1, data, ref, 3000, 1e-4, [&](RunRecord&, ConstView x) {
        const bool same = !prev.empty() && std::equal(x.begin(), x.end(), prev.begin());
        if (same && !in_run) ++runs;
        in_run = same;
        prev.assign(x.begin(), x.end());
        return false;
    });
    const long hit1 = t1.hit(1e-4);
    return {hit2 < hit1 && runs >= 5, "rel_error 1e-4: pdhgskip2 at " + fmt_iter(hit2) + ", pdhgskip1 at " +
                                          fmt_iter(hit1) + " (best " + fmt(t1.best()) + "); pdhgskip1 staircase runs " +
                                          std::to_string(runs)};
}

Outcome criterion9() {
    ExperimentConfig cfg = base_config(Experiment::deblur);
    cfg.height = cfg.width = 32;
    const ExperimentData data = build_data(cfg);

    ExperimentConfig imp = cfg;
    imp.algorithm = Algorithm::pgd;
    imp.inner_iters = 500;
    const SolverResult ri = run_algorithm(imp, data, 5000);

    ExperimentConfig exp = cfg;
    exp.algorithm = Algorithm::pdhg;
    exp.splitting = Splitting::explicit_;
    const SolverResult re = run_algorithm(exp, data, 100000);

    const double diff = rel_error(ri.x, re.x);
    return {diff <= 1e-4, "32x32 deblurring: pgd + tv_prox(500) after 5000 vs explicit pdhg after 100000, rel_error " +
                              fmt(diff) + " (need <= 1e-4)"};
}

Outcome criterion10() {
    std::vector<ExperimentConfig> configs;
    {
        ExperimentConfig c = base_config(Experiment::denoise_dual);
        c.algorithm = Algorithm::proxskip;
        c.p = 0.2;
        c.seed = 5;
        c.outer_iters = 1500;
        configs.push_back(c);
    }
    {
        ExperimentConfig c = base_config(Experiment::denoise_huber);
        c.seed = 6;
        configs.push_back(c);
    }
    {
        ExperimentConfig c = base_config(Experiment::deblur);
        c.height = c.width = 32;
        c.algorithm = Algorithm::proxskip;
        c.p = 0.3;
        c.inner_iters = 10;
        c.outer_iters = 300;
        c.seed = 7;
        configs.push_back(c);
    }
    {
        ExperimentConfig c = base_config(Experiment::tomo);
        c.algorithm = Algorithm::pdhgskip1;
        c.p = 0.3;
        c.inner_iters = 10;
        c.outer_iters = 300;
        c.seed = 8;
        configs.push_back(c);
    }
    auto csv_without_elapsed = [](const IterationLog& log) {
        std::ostringstream os;
        write_csv(log, os);
        std::istringstream in(os.str());
        std::string line, out;
        while (std::getline(in, line)) {
            const auto a = line.find(','), b = line.find(',', a + 1);
            out += line.substr(0, a) + line.substr(b) + "\n";
        }
        return out;
    };
    bool pass = true;
    std::ostringstream os;
    for (const ExperimentConfig& cfg : configs) {
        const ExperimentData data = build_data(cfg);
        const ReferenceSolution ref = compute_reference(cfg, data);
        const ExperimentResult a = run_experiment(cfg, data, ref);
        const ExperimentResult b = run_experiment(cfg, data, ref);
        const bool same = csv_without_elapsed(a.log) == csv_without_elapsed(b.log);
        long applied = 0;
        for (const RunRecord& r : a.log.records()) applied += r.prox_applied;
        const bool counted = applied == a.summary.prox_count && applied == a.log.back().prox_count;
        pass = pass && same && counted;
        os << to_string(cfg.experiment) << "/" << to_string(cfg.algorithm) << ": " << a.log.size() << " rows "
           << (same ? "identical" : "DIFFER") << ", prox_count " << a.summary.prox_count << " vs " << applied
           << " true rows; ";
    }
    return {pass, os.str()};
}

} // namespace

int main(int argc, char** argv) {
    const std::vector<std::function<Outcome()>> criteria = {criterion1, criterion2, criterion3, criterion4,
                                                            criterion5, criterion6, criterion7, criterion8,
                                                            criterion9, criterion10};
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) {
        const int n = std::atoi(argv[i]);
        if (n < 1 || n > static_cast<int>(criteria.size())) {
            std::cerr << "usage: acceptance [criterion 1-10 ...]\n";
            return 64;
        }
        selected.push_back(n);
    }
    if (selected.empty())
        for (int n = 1; n <= static_cast<int>(criteria.size()); ++n) selected.push_back(n);

    // wall-clock budgets in seconds; 7 shares criterion 6's budget
    const double budget[] = {10, 10, 180, 120, 180, 600, 600, 600, 300, 60};
    bool all = true;
    for (int n : selected) {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            o = criteria[static_cast<std::size_t>(n - 1)]();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const double limit = budget[n - 1];
        if (secs > limit) o.pass = false;
        std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << " [" << fmt(secs)
                  << " s of " << fmt(limit) << " s]" << std::endl;
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
