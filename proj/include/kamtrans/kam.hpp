#pragma once

#include <vector>

#include "kamtrans/elliptic.hpp"
#include "kamtrans/grid.hpp"
#include "kamtrans/score.hpp"
#include "kamtrans/transport_map.hpp"

namespace kamtrans {

struct KamOptions {
    int max_iters = 20;
    double tol_v = 1e-8;         // on the interior sup norm of v_n
    double tol_residual = 1e-8;  // on the interior sup norm of p_n - q
    double omega = 1.0;          // damping; 1.0 reproduces the plain Newton step
    bool monotonicity_guard = true;
    BoundaryCondition bc = BoundaryCondition::dirichlet_zero;
};

struct KamHistoryRow {
    int iter;
    double v_sup;         // interior sup norm of the accepted step omega*v_n
    double residual_sup;  // interior sup norm of p_n - q before the step
    double residual_l2;   // grid-weighted interior L2 norm of the same
};

struct KamState {
    int iter = 0;
    ScoreModel p_n;
    TransportMap T;
    std::vector<KamHistoryRow> history;
    bool converged = false;

    KamState(ScoreModel p0, const Grid& grid) : p_n(std::move(p0)), T(grid) {}
};

/// One Newton step: solve L(q) v = p_n - q, damp/guard the update, compose
/// the map and push the score forward through the single newest factor.
/// Throws StepFailureError if the guard cannot restore monotonicity.
KamState kam_step(const KamState& state, const ScoreModel& q, const EllipticOperator& op,
                  const KamOptions& opts);

/// Assemble L(q) once and iterate kam_step until ||v_n|| <= tol_v, the
/// residual drops below tol_residual, or max_iters. Non-convergence is
/// reported through the flag, not an exception.
KamState run_kam(const ScoreModel& p, const ScoreModel& q, const Grid& grid,
                 const KamOptions& opts = {});

/// Ratios r_n = ||u_{n+1}|| / ||u_n||^2 from the recorded residual history;
/// empty when fewer than two nonzero entries exist. Diagnostic only.
std::vector<double> quadratic_contraction_report(const std::vector<KamHistoryRow>& history);

/// History CSV: `iter,v_sup,residual_sup,residual_l2`.
void write_history_csv(const std::vector<KamHistoryRow>& history, std::ostream& os);

}  // namespace kamtrans
