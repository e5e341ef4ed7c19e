#include <doctest.h>

#include <cmath>

#include "kamtrans/errors.hpp"
#include "kamtrans/score.hpp"
#include "kamtrans/score_nd.hpp"

using namespace kamtrans;

TEST_SUITE_BEGIN("score_nd");

namespace {
const ScoreFn kStdNormal = [](const Vec& x) {
    Vec s(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) s[i] = -x[i];
    return s;
};
}  // namespace

TEST_CASE("identity jet: J = I, H = 0, score passes through") {
    const MapFn id = [](const Vec& x) { return x; };
    const PointJet jet = jet_from_map(id, nullptr, {0.2, -0.8, 1.1}, kStdNormal);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(jet.J(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-9));
    for (const Mat& Hk : jet.H)
        for (double v : Hk.a) CHECK(std::abs(v) <= 1e-8);
    const Vec out = pushforward_score_at_point(jet);
    for (int i = 0; i < 3; ++i)
        CHECK(out[static_cast<std::size_t>(i)] ==
              doctest::Approx(jet.score[static_cast<std::size_t>(i)]).epsilon(1e-9));
}

TEST_CASE("affine map: finite-difference Hessians vanish to 1e-8") {
    const MapFn aff = [](const Vec& x) {
        return Vec{1.4 * x[0] - 0.2 * x[1] + 0.3, 0.7 * x[0] + 2.1 * x[1] - 1.0};
    };
    const PointJet jet = jet_from_map(aff, nullptr, {0.9, -0.3}, kStdNormal);
    for (const Mat& Hk : jet.H)
        for (double v : Hk.a) CHECK(std::abs(v) <= 1e-8);
    CHECK(hessian_asymmetry(jet) <= 1e-8);
}

TEST_CASE("hand-differentiated jet of (x1 + x2^2, x2)") {
    const MapFn shear = [](const Vec& x) { return Vec{x[0] + x[1] * x[1], x[1]}; };
    const Vec x = {0.3, 0.8};
    const PointJet jet = jet_from_map(shear, nullptr, x, kStdNormal);
    CHECK(jet.J(0, 0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(jet.J(0, 1) == doctest::Approx(2 * x[1]).epsilon(1e-6));
    CHECK(jet.J(1, 0) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(jet.J(1, 1) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(jet.H[0](1, 1) == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(std::abs(jet.H[0](0, 0)) <= 1e-6);
    CHECK(std::abs(jet.H[0](0, 1)) <= 1e-6);
    CHECK(std::abs(jet.H[1](1, 1)) <= 1e-6);
}

TEST_CASE("analytic gradient route differences the Jacobian") {
    const MapFn shear = [](const Vec& x) { return Vec{x[0] + x[1] * x[1], x[1]}; };
    const JacFn grad = [](const Vec& x) {
        Mat J(2);
        J(0, 0) = 1.0;
        J(0, 1) = 2 * x[1];
        J(1, 0) = 0.0;
        J(1, 1) = 1.0;
        return J;
    };
    const PointJet jet = jet_from_map(shear, grad, {0.3, 0.8}, kStdNormal);
    CHECK(jet.H[0](1, 1) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(hessian_asymmetry(jet) <= 1e-10);
}

TEST_CASE("rotation of the standard normal: exact invariance with analytic jets") {
    const double th = 1.1;
    const double c = std::cos(th), s = std::sin(th);
    PointJet jet;
    jet.x = {0.7, -1.3};
    jet.score = kStdNormal(jet.x);
    jet.J = Mat(2);
    jet.J(0, 0) = c;
    jet.J(0, 1) = -s;
    jet.J(1, 0) = s;
    jet.J(1, 1) = c;
    jet.H.assign(2, Mat(2));
    const Vec out = pushforward_score_at_point(jet);
    CHECK(out[0] == doctest::Approx(-(c * jet.x[0] - s * jet.x[1])).epsilon(1e-10));
    CHECK(out[1] == doctest::Approx(-(s * jet.x[0] + c * jet.x[1])).epsilon(1e-10));
}

TEST_CASE("diagonal scaling gives the product-Gaussian score") {
    const double s1 = 2.0, s2 = 0.5;
    PointJet jet;
    jet.x = {0.4, -0.9};
    jet.score = kStdNormal(jet.x);
    jet.J = Mat(2);
    jet.J(0, 0) = s1;
    jet.J(1, 1) = s2;
    jet.H.assign(2, Mat(2));
    const Vec out = pushforward_score_at_point(jet);
    // -y_i / s_i^2 at y = (s1 x1, s2 x2), i.e. -x_i / s_i
    CHECK(out[0] == doctest::Approx(-jet.x[0] / s1).epsilon(1e-10));
    CHECK(out[1] == doctest::Approx(-jet.x[1] / s2).epsilon(1e-10));
}

TEST_CASE("singular Jacobian raises") {
    PointJet jet;
    jet.x = {0.0, 0.0};
    jet.score = {0.0, 0.0};
    jet.J = Mat(2);  // zero matrix
    jet.H.assign(2, Mat(2));
    CHECK_THROWS_AS(pushforward_score_at_point(jet), DegenerateJacobianError);
}

TEST_CASE("d = 1 reduction matches the 1D integrand to 1e-12") {
    for (double up : {0.5, 1.0, 2.3}) {
        for (double upp : {-1.0, 0.0, 0.7}) {
            PointJet jet;
            jet.x = {0.42};
            jet.score = {-0.42};
            jet.J = Mat(1);
            jet.J(0, 0) = up;
            jet.H.assign(1, Mat(1));
            jet.H[0](0, 0) = upp;
            const double nd = pushforward_score_at_point(jet)[0];
            CHECK(std::abs(nd - score_transform_integrand(-0.42, up, upp)) <= 1e-12);
        }
    }
}

TEST_CASE("pointwise composition property with analytic jets") {
    // inner: diag scaling; outer: shear at the image point
    const Vec x = {0.6, -0.2};
    PointJet inner;
    inner.x = x;
    inner.score = kStdNormal(x);
    inner.J = Mat(2);
    inner.J(0, 0) = 1.5;
    inner.J(1, 1) = 0.8;
    inner.H.assign(2, Mat(2));
    const Vec y = {1.5 * x[0], 0.8 * x[1]};
    PointJet outer;
    outer.x = y;
    outer.J = Mat(2);
    outer.J(0, 0) = 1.0;
    outer.J(0, 1) = 2 * y[1];
    outer.J(1, 0) = 0.0;
    outer.J(1, 1) = 1.0;
    outer.H.assign(2, Mat(2));
    outer.H[0](1, 1) = 2.0;

    const Vec through = pushforward_score_at_point(compose_jets(outer, inner));
    PointJet second = outer;
    second.score = pushforward_score_at_point(inner);
    const Vec sequential = pushforward_score_at_point(second);
    CHECK(std::abs(through[0] - sequential[0]) <= 1e-8);
    CHECK(std::abs(through[1] - sequential[1]) <= 1e-8);
}

TEST_CASE("built-in invariant suite passes") {
    for (const NdCheck& c : run_nd_checks()) {
        INFO(c.name, " measured ", c.measure, " allowed ", c.tolerance);
        CHECK(c.pass);
    }
}

TEST_SUITE_END();
