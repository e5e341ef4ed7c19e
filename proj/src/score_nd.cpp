#include "kamtrans/score_nd.hpp"

#include <cmath>
#include <limits>

#include "kamtrans/elliptic.hpp"
#include "kamtrans/errors.hpp"
#include "kamtrans/score.hpp"

namespace kamtrans {

Mat Mat::identity(int d) {
    Mat m(d);
    for (int i = 0; i < d; ++i) m(i, i) = 1.0;
    return m;
}

namespace {

struct Lu {
    std::vector<double> f;
    std::vector<int> piv;
    int d;
    double det;
};

Lu factor(const Mat& m, double tol_det) {
    Lu lu{m.a, {}, m.d, 1.0};
    try {
        lu_factor(lu.f, lu.piv, m.d);
    } catch (const SingularOperatorError&) {
        throw DegenerateJacobianError("pushforward_score_at_point: singular Jacobian");
    }
    double det = 1.0;
    for (int k = 0; k < m.d; ++k) {
        det *= lu.f[static_cast<std::size_t>(k * m.d + k)];
        if (lu.piv[static_cast<std::size_t>(k)] != k) det = -det;
    }
    lu.det = det;
    if (std::abs(det) < tol_det)
        throw DegenerateJacobianError("pushforward_score_at_point: |det J| below tolerance");
    return lu;
}

Vec solve(const Lu& lu, Vec rhs) {
    lu_solve(lu.f, lu.piv, lu.d, rhs);
    return rhs;
}

Mat transpose(const Mat& m) {
    Mat t(m.d);
    for (int i = 0; i < m.d; ++i)
        for (int j = 0; j < m.d; ++j) t(i, j) = m(j, i);
    return t;
}

double norm2(const Vec& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

}  // namespace

Vec pushforward_score_at_point(const PointJet& jet, double tol_det) {
    const int d = jet.J.d;
    const Lu luJ = factor(jet.J, tol_det);

    // t_i = tr(J^{-1} M_i) with M_i(k,l) = H[k](i,l): solve J y = M_i e_c
    // column by column and pick the diagonal entry.
    Vec t(static_cast<std::size_t>(d), 0.0);
    for (int i = 0; i < d; ++i) {
        for (int c = 0; c < d; ++c) {
            Vec col(static_cast<std::size_t>(d));
            for (int k = 0; k < d; ++k) col[static_cast<std::size_t>(k)] = jet.H[static_cast<std::size_t>(k)](i, c);
            const Vec y = solve(luJ, std::move(col));
            t[static_cast<std::size_t>(i)] += y[static_cast<std::size_t>(c)];
        }
    }

    // (s - t) J^{-1} as a row vector: solve J^T z = (s - t)^T.
    Vec w(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i)
        w[static_cast<std::size_t>(i)] = jet.score[static_cast<std::size_t>(i)] - t[static_cast<std::size_t>(i)];
    const Lu luJt = factor(transpose(jet.J), tol_det);
    return solve(luJt, std::move(w));
}

PointJet jet_from_map(const MapFn& u, const JacFn& grad_u, const Vec& x, const ScoreFn& s) {
    const int d = static_cast<int>(x.size());
    PointJet jet;
    jet.x = x;
    jet.score = s(x);

    const double scale = std::max(1.0, norm2(x));
    const double h1 = std::cbrt(std::numeric_limits<double>::epsilon()) * scale;

    auto shifted = [&](int i, double h) {
        Vec y = x;
        y[static_cast<std::size_t>(i)] += h;
        return y;
    };

    if (grad_u) {
        jet.J = grad_u(x);
        jet.H.assign(static_cast<std::size_t>(d), Mat(d));
        for (int i = 0; i < d; ++i) {
            const Mat jp = grad_u(shifted(i, h1));
            const Mat jm = grad_u(shifted(i, -h1));
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l)
                    jet.H[static_cast<std::size_t>(k)](i, l) = (jp(k, l) - jm(k, l)) / (2 * h1);
        }
        return jet;
    }

    jet.J = Mat(d);
    for (int l = 0; l < d; ++l) {
        const Vec up = u(shifted(l, h1));
        const Vec um = u(shifted(l, -h1));
        for (int k = 0; k < d; ++k)
            jet.J(k, l) = (up[static_cast<std::size_t>(k)] - um[static_cast<std::size_t>(k)]) / (2 * h1);
    }

    const double h2 = std::pow(std::numeric_limits<double>::epsilon(), 0.2) * scale;
    const Vec u0 = u(x);
    jet.H.assign(static_cast<std::size_t>(d), Mat(d));
    for (int i = 0; i < d; ++i) {
        const Vec up = u(shifted(i, h2));
        const Vec um = u(shifted(i, -h2));
        for (int k = 0; k < d; ++k)
            jet.H[static_cast<std::size_t>(k)](i, i) =
                (up[static_cast<std::size_t>(k)] - 2 * u0[static_cast<std::size_t>(k)] +
                 um[static_cast<std::size_t>(k)]) / (h2 * h2);
    }
    for (int i = 0; i < d; ++i) {
        for (int l = i + 1; l < d; ++l) {
            Vec ypp = x, ypm = x, ymp = x, ymm = x;
            ypp[static_cast<std::size_t>(i)] += h2;
            ypp[static_cast<std::size_t>(l)] += h2;
            ypm[static_cast<std::size_t>(i)] += h2;
            ypm[static_cast<std::size_t>(l)] -= h2;
            ymp[static_cast<std::size_t>(i)] -= h2;
            ymp[static_cast<std::size_t>(l)] += h2;
            ymm[static_cast<std::size_t>(i)] -= h2;
            ymm[static_cast<std::size_t>(l)] -= h2;
            const Vec fpp = u(ypp), fpm = u(ypm), fmp = u(ymp), fmm = u(ymm);
            for (int k = 0; k < d; ++k) {
                const double v = (fpp[static_cast<std::size_t>(k)] - fpm[static_cast<std::size_t>(k)] -
                                  fmp[static_cast<std::size_t>(k)] + fmm[static_cast<std::size_t>(k)]) /
                                 (4 * h2 * h2);
                jet.H[static_cast<std::size_t>(k)](i, l) = v;
                jet.H[static_cast<std::size_t>(k)](l, i) = v;
            }
        }
    }
    return jet;
}

PointJet compose_jets(const PointJet& outer, const PointJet& inner) {
    const int d = inner.J.d;
    PointJet jet;
    jet.x = inner.x;
    jet.score = inner.score;
    jet.J = Mat(d);
    for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
            double s = 0.0;
            for (int a = 0; a < d; ++a) s += outer.J(k, a) * inner.J(a, l);
            jet.J(k, l) = s;
        }
    // Hess((U1∘U2)_k) = J2ᵀ HessU1_k J2 + Σ_a ∂_a U1_k HessU2_a
    jet.H.assign(static_cast<std::size_t>(d), Mat(d));
    for (int k = 0; k < d; ++k) {
        Mat& Hk = jet.H[static_cast<std::size_t>(k)];
        for (int i = 0; i < d; ++i)
            for (int l = 0; l < d; ++l) {
                double s = 0.0;
                for (int a = 0; a < d; ++a)
                    for (int b = 0; b < d; ++b)
                        s += inner.J(a, i) * outer.H[static_cast<std::size_t>(k)](a, b) * inner.J(b, l);
                for (int a = 0; a < d; ++a)
                    s += outer.J(k, a) * inner.H[static_cast<std::size_t>(a)](i, l);
                Hk(i, l) = s;
            }
    }
    return jet;
}

double hessian_asymmetry(const PointJet& jet) {
    double m = 0.0;
    for (const Mat& Hk : jet.H)
        for (int i = 0; i < Hk.d; ++i)
            for (int l = 0; l < Hk.d; ++l) m = std::max(m, std::abs(Hk(i, l) - Hk(l, i)));
    return m;
}

namespace {
double max_abs_diff(const Vec& a, const Vec& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}
}  // namespace

std::vector<NdCheck> run_nd_checks() {
    std::vector<NdCheck> checks;
    auto record = [&](const std::string& name, double measure, double tol) {
        checks.push_back({name, measure <= tol, measure, tol});
    };

    const ScoreFn std_normal = [](const Vec& x) {
        Vec s(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) s[i] = -x[i];
        return s;
    };

    // identity map: output equals the input score
    {
        PointJet jet;
        jet.x = {0.3, -0.7};
        jet.score = std_normal(jet.x);
        jet.J = Mat::identity(2);
        jet.H.assign(2, Mat(2));
        record("identity map returns the score unchanged",
               max_abs_diff(pushforward_score_at_point(jet), jet.score), 1e-14);
    }

    // rotation: the standard normal score is rotation-invariant
    {
        const double th = 0.638;
        const double c = std::cos(th), s = std::sin(th);
        PointJet jet;
        jet.x = {0.9, -0.4};
        jet.score = std_normal(jet.x);
        jet.J = Mat(2);
        jet.J(0, 0) = c;
        jet.J(0, 1) = -s;
        jet.J(1, 0) = s;
        jet.J(1, 1) = c;
        jet.H.assign(2, Mat(2));
        const Vec out = pushforward_score_at_point(jet);
        const Vec expected = {-(c * jet.x[0] - s * jet.x[1]), -(s * jet.x[0] + c * jet.x[1])};
        record("rotation of a standard normal (analytic jet)", max_abs_diff(out, expected), 1e-10);
    }

    // diagonal scaling: component-wise -y_i / sigma_i^2
    {
        const double s1 = 1.7, s2 = 0.6;
        PointJet jet;
        jet.x = {0.5, 1.1};
        jet.score = std_normal(jet.x);
        jet.J = Mat(2);
        jet.J(0, 0) = s1;
        jet.J(1, 1) = s2;
        jet.H.assign(2, Mat(2));
        const Vec out = pushforward_score_at_point(jet);
        const Vec expected = {-jet.x[0] / s1, -jet.x[1] / s2};
        record("diagonal scaling of a standard normal (analytic jet)", max_abs_diff(out, expected),
               1e-10);
    }

    // the same two maps with finite-difference jets
    {
        const double th = 0.638;
        const double c = std::cos(th), s = std::sin(th);
        const MapFn rot = [=](const Vec& x) {
            return Vec{c * x[0] - s * x[1], s * x[0] + c * x[1]};
        };
        const Vec x = {0.9, -0.4};
        const PointJet jet = jet_from_map(rot, nullptr, x, std_normal);
        const Vec out = pushforward_score_at_point(jet);
        const Vec expected = {-(c * x[0] - s * x[1]), -(s * x[0] + c * x[1])};
        record("rotation with finite-difference jet", max_abs_diff(out, expected), 1e-6);
        record("finite-difference Hessian symmetry", hessian_asymmetry(jet), 1e-8);
    }

    // affine map: H vanishes under finite differences
    {
        const MapFn aff = [](const Vec& x) {
            return Vec{2.0 * x[0] + 0.5 * x[1] + 1.0, -0.3 * x[0] + 1.5 * x[1] - 2.0};
        };
        const PointJet jet = jet_from_map(aff, nullptr, {0.4, -1.2}, std_normal);
        double hmax = 0.0;
        for (const Mat& Hk : jet.H)
            for (double v : Hk.a) hmax = std::max(hmax, std::abs(v));
        record("affine map has vanishing finite-difference Hessians", hmax, 1e-8);
    }

    // shear-like nonlinear map U(x) = (x1 + x2^2, x2), hand-derived jet
    {
        const MapFn shear = [](const Vec& x) { return Vec{x[0] + x[1] * x[1], x[1]}; };
        const Vec x = {0.3, 0.8};
        const PointJet jet = jet_from_map(shear, nullptr, x, std_normal);
        double err = std::abs(jet.J(0, 0) - 1.0);
        err = std::max(err, std::abs(jet.J(0, 1) - 2 * x[1]));
        err = std::max(err, std::abs(jet.J(1, 0)));
        err = std::max(err, std::abs(jet.J(1, 1) - 1.0));
        err = std::max(err, std::abs(jet.H[0](1, 1) - 2.0));  // only nonzero second derivative
        for (int i = 0; i < 2; ++i)
            for (int l = 0; l < 2; ++l) {
                if (i == 1 && l == 1) continue;
                err = std::max(err, std::abs(jet.H[0](i, l)));
                err = std::max(err, std::abs(jet.H[1](i, l)));
            }
        err = std::max(err, std::abs(jet.H[1](1, 1)));
        record("nonlinear map jet matches hand-computed derivatives", err, 1e-6);
    }

    // pointwise composition property with analytic jets
    {
        const double th = 0.3;
        const double c = std::cos(th), s = std::sin(th);
        const Vec x = {0.25, -0.6};
        // inner: rotation at x; outer: shear at y = rot(x)
        PointJet inner;
        inner.x = x;
        inner.score = std_normal(x);
        inner.J = Mat(2);
        inner.J(0, 0) = c;
        inner.J(0, 1) = -s;
        inner.J(1, 0) = s;
        inner.J(1, 1) = c;
        inner.H.assign(2, Mat(2));
        const Vec y = {c * x[0] - s * x[1], s * x[0] + c * x[1]};
        PointJet outer;
        outer.x = y;
        outer.J = Mat(2);
        outer.J(0, 0) = 1.0;
        outer.J(0, 1) = 2 * y[1];
        outer.J(1, 0) = 0.0;
        outer.J(1, 1) = 1.0;
        outer.H.assign(2, Mat(2));
        outer.H[0](1, 1) = 2.0;

        const PointJet direct = compose_jets(outer, inner);
        const Vec through = pushforward_score_at_point(direct);

        PointJet second = outer;
        second.score = pushforward_score_at_point(inner);
        const Vec sequential = pushforward_score_at_point(second);
        record("composition property at a point (analytic jets)",
               max_abs_diff(through, sequential), 1e-8);
    }

    // d = 1 reduction against the 1D integrand
    {
        const double xv = 0.37, up = 1.8, upp = -0.45, sv = -1.2;
        PointJet jet;
        jet.x = {xv};
        jet.score = {sv};
        jet.J = Mat(1);
        jet.J(0, 0) = up;
        jet.H.assign(1, Mat(1));
        jet.H[0](0, 0) = upp;
        const double nd = pushforward_score_at_point(jet)[0];
        const double oned = score_transform_integrand(sv, up, upp);
        record("d=1 reduction equals the 1D operator integrand", std::abs(nd - oned), 1e-12);
    }

    return checks;
}

}  // namespace kamtrans
