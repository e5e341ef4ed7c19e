#include "kamtrans/kam.hpp"

#include <cmath>
#include <ostream>

#include "kamtrans/errors.hpp"

namespace kamtrans {

namespace {

Extrapolation extrap_for(BoundaryCondition bc) {
    // Dirichlet runs never query outside [a,b]; free-boundary problems live
    // on the whole line, so grid functions extend linearly there.
    return bc == BoundaryCondition::dirichlet_zero ? Extrapolation::clamp : Extrapolation::linear;
}

std::vector<double> residual_values(const ScoreModel& p, const ScoreModel& q, const Grid& g) {
    std::vector<double> u(static_cast<std::size_t>(g.n));
    for (int i = 0; i < g.n; ++i) u[static_cast<std::size_t>(i)] = p(g.node(i)) - q(g.node(i));
    return u;
}

}  // namespace

KamState kam_step(const KamState& state, const ScoreModel& q, const EllipticOperator& op,
                  const KamOptions& opts) {
    const Grid& g = op.grid();
    const Extrapolation ex = extrap_for(opts.bc);

    const std::vector<double> u = residual_values(state.p_n, q, g);
    GridFunction v_raw = op.solve(u);

    double omega = opts.omega;
    const double h = g.h();
    auto increasing_at_omega = [&](double w) {
        for (int i = 0; i + 1 < g.n; ++i)
            if (!(h + w * (v_raw.value(i + 1) - v_raw.value(i)) > 0.0)) return false;
        return true;
    };
    if (opts.monotonicity_guard) {
        int halvings = 0;
        while (!increasing_at_omega(omega) && halvings < 6) {
            omega *= 0.5;
            ++halvings;
        }
        if (!increasing_at_omega(omega))
            throw StepFailureError(
                "kam_step: Id + omega*v not increasing after 6 halvings (iter " +
                std::to_string(state.iter) + ", |v| = " + std::to_string(sup_norm_interior(v_raw)) +
                ")");
    } else if (!increasing_at_omega(omega)) {
        throw StepFailureError("kam_step: Id + omega*v not increasing (guard disabled)");
    }

    std::vector<double> v_vals(static_cast<std::size_t>(g.n));
    std::vector<double> U_vals(static_cast<std::size_t>(g.n));
    for (int i = 0; i < g.n; ++i) {
        v_vals[static_cast<std::size_t>(i)] = omega * v_raw.value(i);
        U_vals[static_cast<std::size_t>(i)] = g.node(i) + v_vals[static_cast<std::size_t>(i)];
    }
    GridFunction v(g, std::move(v_vals), Interp::monotone_cubic, ex);
    GridFunction U(g, std::move(U_vals), Interp::monotone_cubic, ex);

    const GridFunction p_next = score_operator_1d(state.p_n, U).with_extrapolation(ex);

    KamState next(ScoreModel::from_grid(state.p_n.label(), p_next, state.p_n.cap()), g);
    next.iter = state.iter + 1;
    next.T = state.T;
    next.T.stack.push_back(v);
    next.history = state.history;
    next.history.push_back({state.iter, sup_norm_interior(v),
                            sup_norm_interior(u),
                            [&] {
                                double s = 0.0;
                                for (std::size_t i = 1; i + 1 < u.size(); ++i) s += u[i] * u[i];
                                return std::sqrt(g.h() * s);
                            }()});
    next.converged = state.converged;
    return next;
}

KamState run_kam(const ScoreModel& p, const ScoreModel& q, const Grid& grid,
                 const KamOptions& opts) {
    const EllipticOperator op = assemble(q, grid, opts.bc);
    const Extrapolation ex = extrap_for(opts.bc);

    std::vector<double> p0(static_cast<std::size_t>(grid.n));
    for (int i = 0; i < grid.n; ++i) p0[static_cast<std::size_t>(i)] = p(grid.node(i));
    KamState state(ScoreModel::from_grid(p.label(), GridFunction(grid, std::move(p0),
                                                                 Interp::linear, ex),
                                         p.cap()),
                   grid);

    for (int n = 0; n < opts.max_iters; ++n) {
        state = kam_step(state, q, op, opts);
        const double v_sup = state.history.back().v_sup;
        const double res_sup =
            sup_norm_interior(residual_values(state.p_n, q, grid));
        if (v_sup <= opts.tol_v || res_sup <= opts.tol_residual) {
            state.converged = true;
            break;
        }
    }
    return state;
}

std::vector<double> quadratic_contraction_report(const std::vector<KamHistoryRow>& history) {
    std::vector<double> ratios;
    for (std::size_t i = 0; i + 1 < history.size(); ++i) {
        const double u0 = history[i].residual_sup;
        const double u1 = history[i + 1].residual_sup;
        if (u0 > 0.0 && u1 > 0.0) ratios.push_back(u1 / (u0 * u0));
    }
    return ratios;
}

void write_history_csv(const std::vector<KamHistoryRow>& history, std::ostream& os) {
    os << "iter,v_sup,residual_sup,residual_l2\n";
    for (const auto& row : history)
        os << row.iter << ',' << format_double(row.v_sup) << ',' << format_double(row.residual_sup)
           << ',' << format_double(row.residual_l2) << '\n';
}

}  // namespace kamtrans
