#include "kamtrans/selftest.hpp"

#include <cmath>
#include <ostream>

#include "kamtrans/catalog.hpp"
#include "kamtrans/fixed_point.hpp"
#include "kamtrans/kam.hpp"
#include "kamtrans/kernels.hpp"
#include "kamtrans/sampling.hpp"
#include "kamtrans/score.hpp"
#include "kamtrans/score_nd.hpp"

namespace kamtrans {

GridFunction random_monotone_cubic_map(const Grid& grid, std::uint64_t seed) {
    const double g = -0.2 + 0.4 * uniform01_at(seed, 0);
    const double d = -0.5 + 1.0 * uniform01_at(seed, 1);
    const double len = grid.b - grid.a;
    return GridFunction::sample(
        grid,
        [&](double x) {
            const double t = (x - grid.a) / len;
            return x + g * len * t * (1.0 - t) * (2.0 * t - 1.0 - d);
        },
        Interp::monotone_cubic);
}

namespace {

double max_node_diff(const GridFunction& f, const GridFunction& g, bool interior_only) {
    double m = 0.0;
    const int n = f.grid().n;
    for (int i = interior_only ? 1 : 0; i < (interior_only ? n - 1 : n); ++i)
        m = std::max(m, std::abs(f.value(i) - g.value(i)));
    return m;
}

}  // namespace

std::vector<CheckResult> run_selftest() {
    std::vector<CheckResult> out;
    auto record = [&](const std::string& name, double measure, double tol) {
        out.push_back({name, measure <= tol, measure, tol});
    };

    const Grid g128(0.0, 1.0, 128);

    // --- grid calculus ---
    {
        const GridFunction f = GridFunction::sample(g128, [](double x) { return x * x; });
        const GridFunction df = derivative(f);
        double err = 0.0;
        for (int i = 1; i + 1 < g128.n; ++i)
            err = std::max(err, std::abs(df.value(i) - 2.0 * g128.node(i)));
        record("derivative stencil exact on quadratics (interior)", err, 1e-12);
    }
    {
        auto interior_err = [](int n) {
            const Grid g(0.0, 1.0, n);
            const GridFunction f =
                GridFunction::sample(g, [](double x) { return std::sin(2 * M_PI * x); });
            const GridFunction df = derivative(f);
            double err = 0.0;
            for (int i = 1; i + 1 < n; ++i)
                err = std::max(err,
                               std::abs(df.value(i) - 2 * M_PI * std::cos(2 * M_PI * g.node(i))));
            return err;
        };
        const double ratio = interior_err(128) / interior_err(255);
        record("derivative error drops ~4x under grid halving", std::abs(ratio - 4.0), 0.8);
    }
    {
        const GridFunction T = random_monotone_cubic_map(g128, 11);
        const GridFunction S = invert_monotone(T);
        const GridFunction round = compose(T, S);  // exact at S's own nodes
        record("invert then compose recovers Id",
               max_node_diff(round, GridFunction::identity(S.grid()), false),
               5.0 * default_inversion_tol(g128) + 1e-12);
    }
    {
        // associativity at nodes, within 5x the measured interpolation error
        const GridFunction f = random_monotone_cubic_map(g128, 21);
        const GridFunction gm = random_monotone_cubic_map(g128, 22);
        const GridFunction k = random_monotone_cubic_map(g128, 23);
        const GridFunction lhs = compose(compose(f, gm), k);
        const GridFunction rhs = compose(f, compose(gm, k));
        // empirical interpolation error bound: compare node samples of f∘g
        // against the interpolated composition on a refined grid
        const Grid g2(0.0, 1.0, 255);
        double interp_err = 1e-14;
        for (int i = 0; i < g2.n; ++i) {
            const double x = g2.node(i);
            interp_err = std::max(interp_err, std::abs(compose(f, gm)(x) - f(gm(x))));
        }
        record("compose associativity within 5x interpolation error",
               max_node_diff(lhs, rhs, false), 5.0 * interp_err);
    }

    // --- score operator algebra ---
    const ScoreModel gauss_score = ScoreModel::closed_form(
        "gaussian(0.5,0.7)", [](double x) { return -(x - 0.5) / 0.49; },
        [](double) { return -1.0 / 0.49; });
    {
        const GridFunction out_id = score_operator_1d(gauss_score, GridFunction::identity(g128));
        double err = 0.0;
        for (int i = 0; i < g128.n; ++i)
            err = std::max(err, std::abs(out_id.value(i) - gauss_score(g128.node(i))));
        record("score operator identity property (exact)", err, 0.0);
    }
    {
        const double c = 0.23;
        const GridFunction shift =
            GridFunction::sample(g128, [&](double x) { return x + c; }, Interp::monotone_cubic);
        const GridFunction moved = score_operator_1d(gauss_score, shift);
        double err = 0.0;
        for (int i = 0; i < g128.n; ++i) {
            const double y = g128.node(i);
            if (y - c < g128.a || y - c > g128.b) continue;  // clamp region excluded
            err = std::max(err, std::abs(moved.value(i) - gauss_score(y - c)));
        }
        record("score operator shift property", err, kTolGroup);
    }
    {
        double worst = 0.0;
        for (std::uint64_t trial = 0; trial < 100; ++trial) {
            const GridFunction U1 = random_monotone_cubic_map(g128, 1000 + 2 * trial);
            const GridFunction U2 = random_monotone_cubic_map(g128, 1001 + 2 * trial);
            const GridFunction composed = compose(U1, U2);
            const GridFunction lhs = score_operator_1d(gauss_score, composed);
            const GridFunction inner = score_operator_1d(gauss_score, U2);
            const GridFunction rhs =
                score_operator_1d(ScoreModel::from_grid("inner", inner), U1);
            worst = std::max(worst, max_node_diff(lhs, rhs, true));
        }
        record("score operator group property (100 randomized maps)", worst, kTolGroup);
    }
    {
        // normalization invariance: logrho and logrho + const give equal
        // scores — bitwise through the analytic-derivative path, and up to
        // stencil roundoff through the differenced path
        auto logrho = [](double x) { return -0.5 * (x - 0.4) * (x - 0.4) / 0.09; };
        auto dlogrho = [](double x) { return -(x - 0.4) / 0.09; };
        const ScoreModel a1 = score_from_log_density("n1", logrho, g128, dlogrho);
        const ScoreModel a2 = score_from_log_density(
            "n2", [&](double x) { return logrho(x) + 3.7; }, g128, dlogrho);
        double exact_err = 0.0;
        for (int i = 0; i < g128.n; ++i)
            exact_err = std::max(exact_err, std::abs(a1(g128.node(i)) - a2(g128.node(i))));
        record("score normalization invariance (analytic path, exact)", exact_err, 0.0);

        const ScoreModel s1 = score_from_log_density("n1", logrho, g128);
        const ScoreModel s2 = score_from_log_density(
            "n2", [&](double x) { return logrho(x) + 3.7; }, g128);
        double err = 0.0;
        for (int i = 0; i < g128.n; ++i)
            err = std::max(err, std::abs(s1(g128.node(i)) - s2(g128.node(i))));
        record("score normalization invariance (differenced path, roundoff)", err, 1e-11);
    }
    {
        // consistency with densities: score of the change-of-variables density
        // of U♯mu matches the operator route
        const GridFunction U = random_monotone_cubic_map(g128, 77);
        const GridFunction via_operator = score_operator_1d(gauss_score, U);
        auto logrho = [](double x) { return -0.5 * (x - 0.5) * (x - 0.5) / 0.49; };
        const GridFunction Uinv = invert_monotone(U);
        const GridFunction Uprime = derivative(U);
        const ScoreModel via_density = score_from_log_density(
            "pushforward-density",
            [&](double y) {
                const double x = Uinv(y);
                return logrho(x) - std::log(Uprime(x));
            },
            g128);
        double err = 0.0;
        for (int i = 1; i + 1 < g128.n; ++i)
            err = std::max(err, std::abs(via_operator.value(i) - via_density(g128.node(i))));
        record("score operator consistent with change-of-variables density", err, kTolGroup);
    }

    // --- elliptic solver ---
    const ScoreModel qlin = ScoreModel::closed_form(
        "q=-x", [](double x) { return -x; }, [](double) { return -1.0; });
    {
        auto mms_err = [&](int n) {
            const Grid g(0.0, 1.0, n);
            const EllipticOperator op = assemble(qlin, g);
            const GridFunction f = GridFunction::sample(g, [](double x) {
                return -M_PI * M_PI * std::sin(M_PI * x) - x * M_PI * std::cos(M_PI * x) -
                       std::sin(M_PI * x);
            });
            const GridFunction v = op.solve(f);
            double err = 0.0;
            for (int i = 0; i < n; ++i)
                err = std::max(err, std::abs(v.value(i) - std::sin(M_PI * g.node(i))));
            return err;
        };
        const double r1 = mms_err(64) / mms_err(128);
        const double r2 = mms_err(128) / mms_err(256);
        record("manufactured solution order ratio 64->128", std::abs(r1 - 4.0), 0.4);
        record("manufactured solution order ratio 128->256", std::abs(r2 - 4.0), 0.4);
    }
    {
        const EllipticOperator op = assemble(qlin, g128);
        const GridFunction f1 = GridFunction::sample(g128, [](double x) { return std::sin(3 * x); });
        const GridFunction f2 = GridFunction::sample(g128, [](double x) { return std::cos(x); });
        const double al = 1.3, be = -0.7;
        const GridFunction combo = GridFunction::sample(
            g128, [&](double x) { return al * std::sin(3 * x) + be * std::cos(x); });
        const GridFunction v1 = op.solve(f1), v2 = op.solve(f2), vc = op.solve(combo);
        double err = 0.0, scale = 0.0;
        for (int i = 0; i < g128.n; ++i) {
            err = std::max(err, std::abs(vc.value(i) - al * v1.value(i) - be * v2.value(i)));
            scale = std::max(scale, std::abs(vc.value(i)));
        }
        record("elliptic solve linearity (relative)", err / scale, 1e-10);
    }
    {
        auto stability = [&](int n) {
            const Grid g(0.0, 1.0, n);
            const EllipticOperator op = assemble(qlin, g);
            const GridFunction f = GridFunction::sample(g, [](double x) { return std::sin(M_PI * x); });
            const GridFunction v = op.solve(f);
            return sup_norm_interior(v) / 1.0;
        };
        const double r64 = stability(64), r512 = stability(512);
        record("elliptic stability ratio growth 64->512", r512 / r64, 2.0);
    }

    // --- kam invariants on the quadratic benchmark target ---
    {
        const Grid g(0.0, 1.0, 128);
        const CatalogEntry target = resolve_catalog("quadratic_paper", g);
        const CatalogEntry source = resolve_catalog("uniform", g);
        KamOptions opts;
        opts.max_iters = 5;
        const KamState st = run_kam(source.score, target.score, g, opts);
        const GridFunction T = flatten(st.T);
        record("kam flattened map strictly increasing", T.min_increment() > 0 ? 0.0 : 1.0, 0.5);
        // group-property consistency: G(p, flatten(T_n)) ~ p_n, checked where
        // the discretization resolves the target score (the benchmark scores
        // blow up like 1/x at the left endpoint; neither route is accurate
        // inside that zone at n = 128)
        const GridFunction via_flat = score_operator_1d(source.score, T);
        double err = 0.0;
        for (int i = 1; i + 1 < g.n; ++i) {
            if (std::abs(target.score(g.node(i))) > 4.0) continue;
            err = std::max(err, std::abs(via_flat.value(i) - st.p_n.grid_values().value(i)));
        }
        record("kam score/map consistency (G(p, T_n) vs p_n, resolved region)", err, kTolGroup);
        bool monotone = true;
        for (std::size_t k = 2; k < st.history.size(); ++k)
            monotone = monotone && st.history[k].residual_sup <= st.history[k - 1].residual_sup;
        record("kam residual decreases after first iteration", monotone ? 0.0 : 1.0, 0.5);
    }

    // --- oracle and sampling ---
    {
        const Grid g(0.0, 1.0, 128);
        const CatalogEntry mu = resolve_catalog("uniform", g);
        const CatalogEntry nu = resolve_catalog("quadratic_paper", g);
        const GridFunction T_ot = increasing_rearrangement(*mu.density, *nu.density, g);
        record("rearrangement strictly increasing", T_ot.min_increment() > 0 ? 0.0 : 1.0, 0.5);
        double cdf_err = 0.0;
        for (int i = 0; i < g.n; ++i)
            cdf_err = std::max(cdf_err, std::abs(nu.density->cdf(T_ot.value(i)) -
                                                 mu.density->cdf(g.node(i))));
        record("rearrangement pushes cdf levels (sup over nodes)", cdf_err, 1e-6);

        const SampleBatch b1 = sample_source(*nu.density, 20000, 42, Exec::serial);
        const SampleBatch b2 = sample_source(*nu.density, 20000, 42, Exec::parallel);
        double diff = 0.0;
        for (std::size_t i = 0; i < b1.size(); ++i)
            diff = std::max(diff, std::abs(b1.values[i] - b2.values[i]));
        record("sampling serial/parallel bitwise agreement", diff, 0.0);
        record("inverse-cdf draws pass KS against own cdf",
               ks_distance(b1, *nu.density), 1.63 / std::sqrt(20000.0));
    }

    // --- fixed point: scalar recurrence reproduction (first two steps) ---
    {
        const Grid g(-6.0, 6.0, 33);
        const ScoreModel p = ScoreModel::closed_form("std-normal", [](double x) { return -x; },
                                                     [](double) { return -1.0; });
        const ScoreModel q = ScoreModel::closed_form(
            "gaussian(0,2)", [](double x) { return -x / 4.0; }, [](double) { return -0.25; });
        const GridFunction q_inv = check_q_invertible(q, g, Extrapolation::linear);
        GridFunction T = GridFunction::identity(g, Interp::monotone_cubic, Extrapolation::linear);
        double alpha = 1.0, worst = 0.0;
        for (int it = 0; it < 2; ++it) {
            T = fixed_point_step(T, p, q_inv, 0.5).T_next;
            alpha = 0.5 * alpha + 0.5 * 4.0 / alpha;
            double dev = 0.0;
            for (int i = 0; i < g.n; ++i)
                dev = std::max(dev, std::abs(T.value(i) - alpha * g.node(i)));
            worst = std::max(worst, dev);
        }
        record("fixed point reproduces scalar recurrence (2 steps)", worst, 1e-12);
    }

    // --- nd operator ---
    for (const NdCheck& c : run_nd_checks())
        out.push_back({"nd: " + c.name, c.pass, c.measure, c.tolerance});

    return out;
}

int print_check_results(const std::vector<CheckResult>& results, std::ostream& os) {
    int failures = 0;
    for (const auto& r : results) {
        os << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << "  (measured " << r.measure
           << ", allowed " << r.tolerance << ")\n";
        if (!r.pass) ++failures;
    }
    os << (failures == 0 ? "all properties passed\n"
                         : std::to_string(failures) + " properties failed\n");
    return failures;
}

}  // namespace kamtrans
