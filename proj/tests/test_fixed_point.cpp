#include <doctest.h>

#include <cmath>

#include "kamtrans/catalog.hpp"
#include "kamtrans/errors.hpp"
#include "kamtrans/fixed_point.hpp"

using namespace kamtrans;

TEST_SUITE_BEGIN("fixed_point");

namespace {
const ScoreModel kStdNormal = ScoreModel::closed_form("stdnormal", [](double x) { return -x; },
                                                      [](double) { return -1.0; });

ScoreModel gaussian_score(double m, double sigma) {
    const double inv = 1.0 / (sigma * sigma);
    return ScoreModel::closed_form("gaussian", [m, inv](double x) { return -(x - m) * inv; },
                                   [inv](double) { return -inv; });
}

double central_slope(const GridFunction& T) {
    const int c = T.grid().n / 2;
    return (T.value(c + 1) - T.value(c - 1)) / (2.0 * T.grid().h());
}
}  // namespace

TEST_CASE("affine target score inverts exactly") {
    const Grid g(-6.0, 6.0, 65);
    const ScoreModel q = gaussian_score(0.5, 2.0);  // q(y) = -(y-0.5)/4, decreasing
    const GridFunction q_inv = check_q_invertible(q, g);
    // q^{-1}(z) = m - sigma^2 z = 0.5 - 4 z
    for (int j = 0; j < q_inv.grid().n; ++j) {
        const double z = q_inv.grid().node(j);
        CHECK(std::abs(q_inv.value(j) - (0.5 - 4.0 * z)) <= 1e-8);
    }
}

TEST_CASE("bimodal mixture score is rejected") {
    const Grid g(-4.0, 4.0, 65);
    // score of 0.5 N(-2,1) + 0.5 N(2,1): not monotone
    auto rho = [](double x) {
        return std::exp(-0.5 * (x + 2) * (x + 2)) + std::exp(-0.5 * (x - 2) * (x - 2));
    };
    auto drho = [](double x) {
        return -(x + 2) * std::exp(-0.5 * (x + 2) * (x + 2)) -
               (x - 2) * std::exp(-0.5 * (x - 2) * (x - 2));
    };
    const ScoreModel q = ScoreModel::closed_form(
        "bimodal", [=](double x) { return drho(x) / rho(x); }, [](double) { return 0.0; });
    CHECK_THROWS_AS(check_q_invertible(q, g), PreconditionError);
}

TEST_CASE("quadratic benchmark score is strictly decreasing and round-trips") {
    const Grid g(0.0, 1.0, 128);
    const CatalogEntry e = resolve_catalog("quadratic_paper", g);
    // the inverse is of the *gridded* score (the closed form is 1/x-singular
    // at 0 and clamped at the node there), so round-trip via the interpolant
    const GridFunction q_grid =
        GridFunction::sample(g, [&](double x) { return e.score(x); }, Interp::monotone_cubic);
    CHECK(q_grid.min_increment() < 0.0);  // strictly decreasing at every node
    for (int i = 0; i + 1 < g.n; ++i) CHECK(q_grid.value(i + 1) < q_grid.value(i));

    const GridFunction q_inv = check_q_invertible(e.score, g);
    for (int j = 0; j < q_inv.grid().n; ++j) {
        const double z = q_inv.grid().node(j);
        CHECK(std::abs(q_grid(q_inv.value(j)) - z) <= 1e-5 * std::max(1.0, std::abs(z)));
    }
}

TEST_CASE("a transport fixed point stays fixed") {
    // p standard normal, q = gaussian(m=1, sigma=2): T*(x) = 2x + 1
    const Grid g(-6.0, 6.0, 129);
    const ScoreModel q = gaussian_score(1.0, 2.0);
    const GridFunction q_inv = check_q_invertible(q, g, Extrapolation::linear);
    const GridFunction T_star = GridFunction::sample(
        g, [](double x) { return 2.0 * x + 1.0; }, Interp::monotone_cubic, Extrapolation::linear);
    const FpStepResult step = fixed_point_step(T_star, kStdNormal, q_inv, 1.0);
    double dev = 0.0;
    for (int i = 0; i < g.n; ++i)
        dev = std::max(dev, std::abs(step.T_next.value(i) - T_star.value(i)));
    CHECK(dev <= 1e-8);
}

TEST_CASE("unrelaxed Gaussian iteration oscillates with period two") {
    // q = gaussian(0, 2): H maps slope a to 4/a, so from Id: 4, 1, 4, ...
    const Grid g(-6.0, 6.0, 33);
    const ScoreModel q = gaussian_score(0.0, 2.0);
    const GridFunction q_inv = check_q_invertible(q, g, Extrapolation::linear);
    GridFunction T = GridFunction::identity(g, Interp::monotone_cubic, Extrapolation::linear);
    double expected = 1.0;
    for (int it = 0; it < 3; ++it) {
        T = fixed_point_step(T, kStdNormal, q_inv, 1.0).T_next;
        expected = 4.0 / expected;
        CHECK(std::abs(central_slope(T) - expected) <= 1e-10);
    }
}

TEST_CASE("relaxed iteration follows the Babylonian recurrence") {
    const Grid g(-6.0, 6.0, 33);
    const ScoreModel q = gaussian_score(0.0, 2.0);
    const GridFunction q_inv = check_q_invertible(q, g, Extrapolation::linear);
    GridFunction T = GridFunction::identity(g, Interp::monotone_cubic, Extrapolation::linear);
    double alpha = 1.0;
    // all-node match for the first two steps (the roundoff amplification of
    // the discrete map limits later steps; see run_fixed_point's guard)
    for (int it = 0; it < 2; ++it) {
        T = fixed_point_step(T, kStdNormal, q_inv, 0.5).T_next;
        alpha = 0.5 * (alpha + 4.0 / alpha);
        double dev = 0.0;
        for (int i = 0; i < g.n; ++i)
            dev = std::max(dev, std::abs(T.value(i) - alpha * g.node(i)));
        CHECK(dev <= 1e-12);
    }
    // the next iterations still track the scalar recurrence at the center
    for (int it = 2; it < 5; ++it) {
        T = fixed_point_step(T, kStdNormal, q_inv, 0.5).T_next;
        alpha = 0.5 * (alpha + 4.0 / alpha);
        CHECK(std::abs(central_slope(T) - alpha) <= 1e-9);
    }
    CHECK(std::abs(alpha - 2.0) <= 1e-7);
}

TEST_CASE("matched source and target converge immediately") {
    const Grid g(-4.0, 4.0, 65);
    const ScoreModel q = gaussian_score(0.0, 1.0);
    FpOptions opts;
    opts.tol = 1e-6;
    const FpResult res = run_fixed_point(q, q, g, opts);
    CHECK(res.converged);
    CHECK(res.iterations == 1);
    double dev = 0.0;
    for (int i = 0; i < g.n; ++i) dev = std::max(dev, std::abs(res.T.value(i) - g.node(i)));
    CHECK(dev <= 1e-6);
}

TEST_CASE("relaxed run reaches the affine transport; unrelaxed run does not converge") {
    // coarse grid: affine data is stencil-exact at any resolution, and the
    // grid-scale noise amplification of the step (~ sigma^2 / (h T')^2 per
    // iteration) stays harmless while the intercept converges at rate
    // (1 - omega) toward m, which takes ~17 relaxed iterations for 1e-5
    const Grid g(-7.0, 9.0, 17);
    const ScoreModel q = gaussian_score(1.0, 2.0);
    FpOptions relaxed;
    relaxed.omega = 0.5;
    relaxed.tol = 1e-5;
    relaxed.max_iters = 24;
    relaxed.extend_q_inverse = true;
    const FpResult res = run_fixed_point(kStdNormal, q, g, relaxed);
    CHECK(res.converged);
    double dev = 0.0;
    for (int i = 0; i < g.n; ++i)
        dev = std::max(dev, std::abs(res.T.value(i) - (2.0 * g.node(i) + 1.0)));
    CHECK(dev <= 1e-5);

    FpOptions plain = relaxed;
    plain.omega = 1.0;
    plain.max_iters = 8;
    const FpResult bad = run_fixed_point(kStdNormal, q, g, plain);
    CHECK(!bad.converged);
    // oscillating history: increments do not decay
    REQUIRE(bad.history.size() >= 3);
    CHECK(bad.history.back().increment_sup > bad.history.front().increment_sup * 1e-3);
}

TEST_CASE("fixed-point residency: small increments imply a small score residual") {
    const Grid g(-7.0, 9.0, 17);
    const ScoreModel q = gaussian_score(1.0, 2.0);
    FpOptions opts;
    opts.omega = 0.5;
    opts.tol = 1e-5;
    opts.max_iters = 24;
    opts.extend_q_inverse = true;
    const FpResult res = run_fixed_point(kStdNormal, q, g, opts);
    REQUIRE(res.converged);
    const double tol_reached = res.history.back().increment_sup;
    const GridFunction gp = score_operator_1d(kStdNormal, res.T);
    double resid = 0.0;
    for (int i = 1; i + 1 < g.n; ++i)
        resid = std::max(resid, std::abs(gp.value(i) - q(g.node(i))));
    const double K = resid / std::max(tol_reached, 1e-300);
    CHECK(std::isfinite(K));
    CHECK(resid <= 10.0 * std::max(tol_reached, 1e-8));
}

TEST_SUITE_END();
