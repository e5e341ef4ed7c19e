#include "kamtrans/fixed_point.hpp"

#include <algorithm>
#include <cmath>

#include "kamtrans/errors.hpp"

namespace kamtrans {

GridFunction check_q_invertible(const ScoreModel& q, const Grid& grid, Extrapolation extrap) {
    std::vector<double> qv(static_cast<std::size_t>(grid.n));
    for (int i = 0; i < grid.n; ++i) qv[static_cast<std::size_t>(i)] = q(grid.node(i));

    int direction = 0;  // +1 increasing, -1 decreasing
    for (std::size_t i = 0; i + 1 < qv.size(); ++i) {
        const double d = qv[i + 1] - qv[i];
        const int s = d > 0 ? 1 : (d < 0 ? -1 : 0);
        if (s == 0 || (direction != 0 && s != direction))
            throw PreconditionError(
                "check_q_invertible: target score is not strictly monotone at node " +
                std::to_string(i) +
                "; the fixed-point iteration requires q to be a homeomorphism onto its image "
                "(multi-modal targets are excluded)");
        direction = s;
    }

    // tighter than the generic inversion tolerance: extension slopes divide
    // node errors by the node spacing
    const double tol = 1e-13 * (grid.b - grid.a);
    if (direction > 0) {
        const GridFunction qf(grid, std::move(qv), Interp::monotone_cubic, extrap);
        return invert_monotone(qf, tol).with_extrapolation(extrap);
    }
    // decreasing: invert -q (increasing), then flip the argument axis
    std::vector<double> neg(qv.size());
    for (std::size_t i = 0; i < qv.size(); ++i) neg[i] = -qv[i];
    const GridFunction rf(grid, std::move(neg), Interp::monotone_cubic, extrap);
    const GridFunction S = invert_monotone(rf, tol).with_extrapolation(extrap);
    // S is defined on [-q(a), -q(b)]; re-express on [q(b), q(a)]
    const Grid zgrid(-S.grid().b, -S.grid().a, grid.n);
    std::vector<double> inv(static_cast<std::size_t>(grid.n));
    for (int j = 0; j < grid.n; ++j) inv[static_cast<std::size_t>(j)] = S(-zgrid.node(j));
    return GridFunction(zgrid, std::move(inv), Interp::monotone_cubic, extrap);
}

FpStepResult fixed_point_step(const GridFunction& T, const ScoreModel& p,
                              const GridFunction& q_inv, double omega, double tol_jac) {
    const Grid& g = T.grid();
    const GridFunction Tp = derivative(T);
    const GridFunction Tpp = second_derivative(T);

    const double zlo = q_inv.grid().a, zhi = q_inv.grid().b;
    const bool clamp_range = q_inv.extrapolation() == Extrapolation::clamp;

    std::vector<double> next(static_cast<std::size_t>(g.n));
    long long clamped = 0;
    for (int i = 0; i < g.n; ++i) {
        const double tp = Tp.value(i);
        if (std::abs(tp) < tol_jac)
            throw DegenerateJacobianError("fixed_point_step: |T'| < tol_jac at node " +
                                          std::to_string(i));
        const double x = g.node(i);
        double z = (p(x) - Tpp.value(i) / tp) / tp;
        if (clamp_range && (z < zlo || z > zhi)) {
            z = std::clamp(z, zlo, zhi);
            ++clamped;
        }
        const double H = q_inv(z);
        next[static_cast<std::size_t>(i)] = (1.0 - omega) * T.value(i) + omega * H;
    }
    return {GridFunction(g, std::move(next), T.interp(), T.extrapolation()), clamped};
}

FpResult run_fixed_point(const ScoreModel& p, const ScoreModel& q, const Grid& grid,
                         const FpOptions& opts) {
    const Extrapolation ex =
        opts.extend_q_inverse ? Extrapolation::linear : Extrapolation::clamp;
    const GridFunction q_inv = check_q_invertible(q, grid, ex);

    GridFunction T = GridFunction::identity(grid, Interp::monotone_cubic, ex);
    FpResult result{T, {}, false, 0};
    GridFunction best = T;
    double best_increment = INFINITY;

    for (int n = 0; n < opts.max_iters; ++n) {
        const FpStepResult step = fixed_point_step(T, p, q_inv, opts.omega);
        double inc = 0.0;
        for (int i = 0; i < grid.n; ++i)
            inc = std::max(inc, std::abs(step.T_next.value(i) - T.value(i)));
        T = step.T_next;
        result.history.push_back({n, inc, step.clamped});
        result.iterations = n + 1;
        if (inc < best_increment) {
            best_increment = inc;
            best = T;
        }
        if (inc <= opts.tol) {
            result.converged = true;
            best = T;
            break;
        }
        if (n > 2 && inc > 10.0 * best_increment) break;  // diverging; keep the best iterate
    }
    result.T = best;
    return result;
}

}  // namespace kamtrans
