#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "imgskip/errors.hpp"
#include "imgskip/phantoms.hpp"
#include "imgskip/problems.hpp"
#include "imgskip/solvers.hpp"
#include "test_util.hpp"

using namespace imgskip;
using testutil::random_vec;

namespace {

// Central-difference gradient of a scalar function.
Vec fd_gradient(const std::function<double(ConstView)>& f, Vec x, double h) {
    Vec g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        x[i] = xi + h;
        const double fp = f(x);
        x[i] = xi - h;
        const double fm = f(x);
        x[i] = xi;
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

double rel_diff(ConstView a, ConstView b) {
    Vec d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return norm2(d) / norm2(b);
}

} // namespace

TEST_CASE("dual ROF constants") {
    const Image b(6, 5, random_vec(30, 1));
    const DualRofProblem rof = build_dual_rof(b, 0.4);
    CHECK(rof.mu == 0.0);
    CHECK(rof.lipschitz == 8.0);
    CHECK(rof.smooth().strong_convexity == 0.0);

    const DualRofProblem hub = build_dual_rof(b, 0.55, 0.1);
    CHECK(hub.mu == doctest::Approx(2.0 / 11.0).epsilon(1e-15));
    CHECK(hub.lipschitz == doctest::Approx(8.0 + 2.0 / 11.0).epsilon(1e-15));

    CHECK_THROWS_AS(build_dual_rof(b, 0.0), ParameterError);
    CHECK_THROWS_AS(build_dual_rof(b, 0.5, -0.1), ParameterError);
}

TEST_CASE("dual ROF gradient") {
    const std::size_t h = 6, w = 5, n = h * w;
    const Image b(h, w, random_vec(n, 2));

    // grad F(0) = -D b
    const DualRofProblem rof = build_dual_rof(b, 0.4);
    Vec g(2 * n);
    rof.gradient(Vec(2 * n, 0.0), g);
    const Vec db = testutil::naive_grad(b.flat(), h, w);
    for (std::size_t k = 0; k < 2 * n; ++k) CHECK(g[k] == doctest::Approx(-db[k]).epsilon(1e-14));

    for (double eps : {0.0, 0.1}) {
        const DualRofProblem p = build_dual_rof(b, 0.55, eps);
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const Vec q = random_vec(2 * n, 10 + seed, -0.5, 0.5);
            p.gradient(q, g);
            const Vec fd = fd_gradient([&](ConstView v) { return p.objective(v); }, q, 1e-6);
            CHECK(rel_diff(g, fd) <= 1e-5);
        }
    }
}

TEST_CASE("huber strong convexity certificate") {
    const Image b(8, 8, random_vec(64, 3));
    const DualRofProblem p = build_dual_rof(b, 0.55, 0.1);
    Vec g1(128), g2(128);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Vec q1 = random_vec(128, 100 + seed), q2 = random_vec(128, 200 + seed);
        p.gradient(q1, g1);
        p.gradient(q2, g2);
        double lhs = 0.0, dq2 = 0.0;
        for (std::size_t k = 0; k < 128; ++k) {
            lhs += (g1[k] - g2[k]) * (q1[k] - q2[k]);
            dq2 += (q1[k] - q2[k]) * (q1[k] - q2[k]);
        }
        CHECK(lhs >= p.mu * dq2 - 1e-10);
    }
}

TEST_CASE("dual ROF objective decreases under projgd") {
    const Image b = add_noise(gen_shapes_phantom(24, 24), 0.05, 4);
    const DualRofProblem p = build_dual_rof(b, 0.3);
    std::vector<double> values;
    run_pgd(p.prox_problem(), Vec(p.dual_size(), 0.0), 1.0 / 8.0, 500, [&](RunRecord&, ConstView q) {
        values.push_back(p.objective(q));
        return false;
    });
    for (std::size_t k = 1; k < values.size(); ++k) CHECK(values[k] <= values[k - 1] + 1e-12);
}

TEST_CASE("primal_from_dual") {
    const Image b(7, 9, random_vec(63, 5));
    CHECK(primal_from_dual(DualField(7, 9), b) == b);
    const DualField q1(7, 9, random_vec(126, 6)), q2(7, 9, random_vec(126, 7));
    DualField sum(7, 9);
    for (std::size_t k = 0; k < 126; ++k) sum.flat()[k] = q1.flat()[k] + q2.flat()[k];
    const Image zero(7, 9);
    const Image lhs = primal_from_dual(sum, zero);
    const Vec d1 = testutil::naive_div(q1.flat(), 7, 9), d2 = testutil::naive_div(q2.flat(), 7, 9);
    for (std::size_t k = 0; k < 63; ++k) CHECK(lhs.flat()[k] == doctest::Approx(d1[k] + d2[k]).epsilon(1e-13));
    CHECK_THROWS_AS(primal_from_dual(DualField(7, 8), b), ShapeError);

    SUBCASE("long-run dual optimum gives the denoised image") {
        const Image bn = add_noise(gen_shapes_phantom(32, 32), 0.05, 8);
        const double alpha = 0.3;
        const Vec u_ref = testutil::rof_primal(bn, testutil::rof_dual_oracle(bn, alpha, 200000));
        const DualRofProblem p = build_dual_rof(bn, alpha);
        const SolverResult r = run_aprojgd(p.smooth(), p.projector(), Vec(p.dual_size(), 0.0), 1.0 / 8.0, 20000);
        const Image u = primal_from_dual(DualField(32, 32, r.x), bn);
        CHECK(rel_error(u.flat(), u_ref) <= 1e-5);
    }
}

TEST_CASE("explicit splitting: hand-traced PDHG steps on a 2x2 image") {
    // b = [[1, 2], [3, 5]], A = identity, sigma = tau = 1/4, alpha = 0.06
    const Vec b{1, 2, 3, 5};
    const GridShape g{2, 2};
    const TvReconstructionProblem prob =
        build_tv_recon(identity_map(ElementShape::image(g)), b, g, 0.06, false, Splitting::explicit_, 1);
    const SaddleProblem sp = prob.saddle_problem();
    REQUIRE(sp.K.range_size() == 12);

    // Step 1 from zeros: x1 = 0, y1 = (-tau b / (1 + tau), 0) = (-0.2 b, 0).
    const SolverResult one = run_pdhg(sp, Vec(4, 0.0), Vec(12, 0.0), 0.25, 0.25, 1);
    CHECK(one.x == Vec(4, 0.0));
    for (std::size_t k = 0; k < 4; ++k) CHECK(one.y[k] == doctest::Approx(-0.2 * b[k]).epsilon(1e-15));
    for (std::size_t k = 4; k < 12; ++k) CHECK(one.y[k] == 0.0);

    // Step 2: x2 = -sigma y1_A = 0.05 b, xbar = 0.1 b = [[0.1, 0.2], [0.3, 0.5]],
    // y2_A = (y1_A + tau xbar - tau b) / (1 + tau) = -0.34 b,
    // D xbar: dy = [0.2, 0.3, 0, 0], dx = [0.1, 0, 0.2, 0];
    // y2_D = ball projection of tau D xbar at radius 0.06: pixel (0,1) has |(0.075, 0)| > 0.06.
    const SolverResult two = run_pdhg(sp, Vec(4, 0.0), Vec(12, 0.0), 0.25, 0.25, 2);
    const Vec y2_d{0.05, 0.06, 0.0, 0.0, 0.025, 0.0, 0.05, 0.0};
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(two.x[k] == doctest::Approx(0.05 * b[k]).epsilon(1e-14));
        CHECK(two.y[k] == doctest::Approx(-0.34 * b[k]).epsilon(1e-14));
    }
    for (std::size_t k = 0; k < 8; ++k) CHECK(std::abs(two.y[4 + k] - y2_d[k]) <= 1e-15);
}

TEST_CASE("tv reconstruction: gradients and objectives") {
    const GridShape g{8, 8};
    const LinearMap A = blur_map(g, BlurKernel::gaussian(3, 1.0));
    const Vec b = random_vec(64, 9);
    const TvReconstructionProblem imp = build_tv_recon(A, b, g, 0.2, false, Splitting::implicit, 10);
    const TvReconstructionProblem exp = build_tv_recon(A, b, g, 0.2, false, Splitting::explicit_, 10);

    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Vec u = random_vec(64, 20 + seed);
        Vec grad(64);
        imp.fidelity_gradient(u, grad);
        const Vec fd = fd_gradient([&](ConstView v) { return imp.fidelity(v); }, u, 1e-6);
        CHECK(rel_diff(grad, fd) <= 1e-6);

        // independent two-term evaluation
        const Vec au = A.forward(u);
        long double ls = 0.0L;
        for (std::size_t i = 0; i < 64; ++i) ls += 0.5L * (au[i] - b[i]) * (au[i] - b[i]);
        const double expected = static_cast<double>(ls) + 0.2 * testutil::naive_tv(u, 8, 8);
        CHECK(objective_tv(u, imp) == doctest::Approx(expected).epsilon(1e-12));
        CHECK(objective_tv(u, imp) == doctest::Approx(objective_tv(u, exp)).epsilon(1e-12));

        const ProxProblem pp = imp.prox_problem();
        CHECK(pp.smooth.objective(u) + pp.g_value(u) == doctest::Approx(expected).epsilon(1e-12));
    }

    SUBCASE("exact data and constant u give zero") {
        const Vec u(64, 0.7);
        const TvReconstructionProblem p = build_tv_recon(A, A.forward(u), g, 0.5, false, Splitting::implicit, 1);
        CHECK(std::abs(objective_tv(u, p)) <= 1e-14);
    }
    SUBCASE("vanishing alpha leaves least squares") {
        const Vec u = random_vec(64, 40);
        const TvReconstructionProblem p = build_tv_recon(A, b, g, 1e-300, false, Splitting::implicit, 1);
        CHECK(objective_tv(u, p) == doctest::Approx(p.fidelity(u)).epsilon(1e-15));
    }
    SUBCASE("nonnegativity sentinel") {
        const TvReconstructionProblem p = build_tv_recon(A, b, g, 0.2, true, Splitting::implicit, 1);
        Vec u(64, 0.5);
        CHECK(std::isfinite(objective_tv(u, p)));
        u[10] = -1e-13;
        CHECK(std::isfinite(objective_tv(u, p)));
        u[10] = -1e-9;
        CHECK(objective_tv(u, p) == std::numeric_limits<double>::infinity());
    }
    SUBCASE("parameter and shape errors") {
        CHECK_THROWS_AS(build_tv_recon(A, b, g, 0.0, false, Splitting::implicit, 1), ParameterError);
        CHECK_THROWS_AS(build_tv_recon(A, b, g, 0.2, false, Splitting::implicit, 0), ParameterError);
        CHECK_THROWS_AS(build_tv_recon(A, Vec(63), g, 0.2, false, Splitting::implicit, 1), ShapeError);
        CHECK_THROWS_AS(build_tv_recon(A, b, GridShape{8, 7}, 0.2, false, Splitting::implicit, 1), ShapeError);
        CHECK_THROWS_AS(exp.prox_problem(), ParameterError);
    }
}

TEST_CASE("implicit prox uses weight gamma * alpha") {
    const GridShape g{10, 10};
    const Vec b = random_vec(100, 41);
    const TvReconstructionProblem prob =
        build_tv_recon(identity_map(ElementShape::image(g)), b, g, 0.3, false, Splitting::implicit, 25);
    const ProxProblem pp = prob.prox_problem();
    const Vec x = random_vec(100, 42);
    Vec out(100);
    pp.prox_g(x, 0.5, out);
    TvProxState st(g, 25);
    const Image direct = tv_prox(Image(10, 10, x), 0.15, st);
    CHECK(out == direct.vec());
    CHECK(pp.inner_iterations() == 25);
}

TEST_CASE("implicit and explicit splittings agree on a small deblurring problem") {
    const GridShape g{16, 16};
    const LinearMap A = blur_map(g, BlurKernel::gaussian(5, 1.0));
    const Image truth = gen_shapes_phantom(16, 16);
    const Vec b = add_noise(A.forward(truth.flat()), 0.01, 5);
    const double alpha = 0.02;

    TvReconstructionProblem imp = build_tv_recon(A, b, g, alpha, false, Splitting::implicit, 500);
    const ProxProblem pp = imp.prox_problem();
    const SolverResult ri = run_fista(pp, Vec(g.size(), 0.0), 1.0 / pp.smooth.lipschitz, 3000);

    const TvReconstructionProblem exp = build_tv_recon(A, b, g, alpha, false, Splitting::explicit_, 1);
    const SolverResult re = run_pdhg_preconditioned(exp.saddle_problem(), 60000);

    CHECK(rel_error(ri.x, re.x) <= 1e-4);
}
