#include <doctest.h>

#include <cmath>
#include <sstream>

#include "kamtrans/errors.hpp"
#include "kamtrans/grid.hpp"
#include "kamtrans/selftest.hpp"

using namespace kamtrans;

TEST_SUITE_BEGIN("grid");

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(Grid(1.0, 0.0, 16), DomainError);
    CHECK_THROWS_AS(Grid(0.0, 1.0, 2), DomainError);
    const Grid g(0.0, 1.0, 128);
    CHECK(g.h() == doctest::Approx(1.0 / 127.0));
    CHECK(g.node(0) == 0.0);
    CHECK(g.node(127) == doctest::Approx(1.0));
}

TEST_CASE("interp_eval on the identity and clamped extrapolation") {
    const Grid g(0.0, 1.0, 64);
    const GridFunction id = GridFunction::identity(g);
    CHECK(id(0.5) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(id(1.5) == id.value(63));  // clamp to boundary value
    CHECK(id(-0.2) == id.value(0));
    CHECK_THROWS_AS(id(std::nan("")), DomainError);
}

TEST_CASE("interp_eval of x^2 on the 128-node grid") {
    const Grid g(0.0, 1.0, 128);
    const GridFunction f = GridFunction::sample(g, [](double x) { return x * x; });
    CHECK(std::abs(f(0.25) - 0.0625) <= 1e-4);
    const GridFunction fc = f.with_interp(Interp::monotone_cubic);
    CHECK(std::abs(fc(0.25) - 0.0625) <= 1e-6);
}

TEST_CASE("linear extrapolation extends the boundary slope") {
    const Grid g(0.0, 1.0, 32);
    const GridFunction f = GridFunction::sample(
        g, [](double x) { return 3.0 * x - 1.0; }, Interp::linear, Extrapolation::linear);
    CHECK(f(1.5) == doctest::Approx(3.5).epsilon(1e-12));
    CHECK(f(-1.0) == doctest::Approx(-4.0).epsilon(1e-12));
    const GridFunction fc = f.with_interp(Interp::monotone_cubic);
    CHECK(fc(2.0) == doctest::Approx(5.0).epsilon(1e-10));
}

TEST_CASE("derivative of the identity is exactly one") {
    const Grid g(0.0, 1.0, 64);
    const GridFunction d = derivative(GridFunction::identity(g));
    for (int i = 0; i < g.n; ++i) CHECK(d.value(i) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("centered stencil exact on quadratics") {
    const Grid g(0.0, 1.0, 128);
    const GridFunction f = GridFunction::sample(g, [](double x) { return x * x; });
    const GridFunction d = derivative(f);
    CHECK(std::abs(d(0.5) - 1.0) <= 1e-12);
    const GridFunction d2 = second_derivative(f);
    for (int i = 0; i < g.n; ++i) CHECK(d2.value(i) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("derivative converges at second order") {
    auto interior_err = [](int n) {
        const Grid g(0.0, 1.0, n);
        const GridFunction f =
            GridFunction::sample(g, [](double x) { return std::sin(2 * M_PI * x); });
        const GridFunction d = derivative(f);
        double err = 0.0;
        for (int i = 1; i + 1 < n; ++i)
            err = std::max(err, std::abs(d.value(i) - 2 * M_PI * std::cos(2 * M_PI * g.node(i))));
        return err;
    };
    // halving h (n-1 doubles) divides the interior error by 4 +- 20%
    const double ratio = interior_err(128) / interior_err(255);
    CHECK(ratio > 3.2);
    CHECK(ratio < 4.8);
}

TEST_CASE("compose with the identity and with shifts") {
    const Grid g(0.0, 1.0, 64);
    const GridFunction f = random_monotone_cubic_map(g, 5);
    const GridFunction with_id = compose(f, GridFunction::identity(g));
    for (int i = 0; i < g.n; ++i)
        CHECK(with_id.value(i) == doctest::Approx(f.value(i)).epsilon(1e-14));

    const double c = 0.125, d = 0.0625;
    const GridFunction sc = GridFunction::sample(
        g, [&](double x) { return x + c; }, Interp::monotone_cubic, Extrapolation::linear);
    const GridFunction sd = GridFunction::sample(
        g, [&](double x) { return x + d; }, Interp::monotone_cubic, Extrapolation::linear);
    const GridFunction both = compose(sc, sd);
    for (int i = 1; i + 1 < g.n; ++i)
        CHECK(both.value(i) == doctest::Approx(g.node(i) + c + d).epsilon(1e-12));
}

TEST_CASE("compose x^2 with 2x matches 4x^2 inside [0, 0.5]") {
    const Grid g(0.0, 1.0, 128);
    const GridFunction f = GridFunction::sample(g, [](double x) { return x * x; });
    const GridFunction two_x = GridFunction::sample(g, [](double x) { return 2.0 * x; });
    const GridFunction fg = compose(f, two_x);
    for (int i = 0; i < g.n; ++i) {
        const double x = g.node(i);
        if (x > 0.5) break;
        CHECK(std::abs(fg.value(i) - 4.0 * x * x) <= 1e-4);
    }
}

TEST_CASE("invert_monotone on the identity and an affine map") {
    const Grid g(0.0, 1.0, 64);
    const GridFunction inv_id = invert_monotone(GridFunction::identity(g));
    for (int i = 0; i < g.n; ++i)
        CHECK(inv_id.value(i) == doctest::Approx(g.node(i)).epsilon(1e-10));

    const GridFunction T = GridFunction::sample(
        g, [](double x) { return 2.0 * x + 1.0; }, Interp::monotone_cubic);
    const GridFunction S = invert_monotone(T);
    CHECK(S.grid().a == doctest::Approx(1.0));
    CHECK(S.grid().b == doctest::Approx(3.0));
    for (int j = 0; j < S.grid().n; ++j) {
        const double y = S.grid().node(j);
        CHECK(std::abs(S.value(j) - (y - 1.0) / 2.0) <= default_inversion_tol(g) + 1e-13);
    }
}

TEST_CASE("round trip through a strictly increasing cubic") {
    const Grid g(0.0, 1.0, 128);
    const GridFunction T = random_monotone_cubic_map(g, 9);
    for (int k = 0; k < 64; ++k) {
        const double y = T.value(0) + (T.value(127) - T.value(0)) * (k + 0.5) / 64.0;
        const double x = invert_at(T, y);
        CHECK(std::abs(T(x) - y) <= 1e-8);
    }
}

TEST_CASE("non-monotone input raises InvertibilityError with the node index") {
    const Grid g(0.0, 1.0, 16);
    std::vector<double> vals(16);
    for (int i = 0; i < 16; ++i) vals[static_cast<std::size_t>(i)] = g.node(i);
    vals[8] = vals[9] + 0.1;  // break monotonicity between nodes 8 and 9
    const GridFunction bad(g, vals, Interp::linear);
    CHECK_THROWS_AS(invert_monotone(bad), InvertibilityError);
    try {
        invert_monotone(bad);
    } catch (const InvertibilityError& e) {
        CHECK(e.node() == 8);
    }
}

TEST_CASE("monotone cubic interpolation preserves monotone data between nodes") {
    const Grid g(0.0, 1.0, 32);
    // steep-then-flat monotone data that overshoots under plain cubic splines
    const GridFunction f = GridFunction::sample(
        g, [](double x) { return x < 0.5 ? 2.0 * x : 1.0 + 0.01 * (x - 0.5); },
        Interp::monotone_cubic);
    double prev = f(0.0);
    for (int k = 1; k <= 1000; ++k) {
        const double x = k / 1000.0;
        const double y = f(x);
        CHECK(y >= prev - 1e-14);
        prev = y;
    }
}

TEST_CASE("CSV round trip preserves exact values") {
    const Grid g(-1.5, 2.5, 33);
    const GridFunction f = GridFunction::sample(g, [](double x) { return std::exp(x) * 1e-7; });
    std::ostringstream os;
    write_csv(f, os);
    std::istringstream is(os.str());
    const GridFunction back = read_csv(is);
    REQUIRE(back.grid().n == g.n);
    for (int i = 0; i < g.n; ++i) CHECK(back.value(i) == f.value(i));
}

TEST_SUITE_END();
