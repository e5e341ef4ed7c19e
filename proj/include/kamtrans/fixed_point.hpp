#pragma once

#include <vector>

#include "kamtrans/grid.hpp"
#include "kamtrans/score.hpp"

namespace kamtrans {

struct FpOptions {
    int max_iters = 50;
    double tol = 1e-8;   // on sup-node |T_{n+1} - T_n|
    double omega = 0.5;  // relaxation; 1.0 is the plain (non-contractive) map
    /// Extend the gridded q^{-1} linearly beyond its stored range instead of
    /// clamping (exact when q is affine). Clamping keeps a counter either way.
    bool extend_q_inverse = false;
};

/// Grid inverse of a strictly monotone target score (increasing or
/// decreasing). Throws PreconditionError for non-monotone q (the iteration
/// requires q to be a homeomorphism onto its image, which multi-modal
/// targets violate).
GridFunction check_q_invertible(const ScoreModel& q, const Grid& grid,
                                Extrapolation extrap = Extrapolation::clamp);

struct FpStepResult {
    GridFunction T_next;
    long long clamped;  // transported-score values clamped into q's range
};

/// One iteration: H(T) = q^{-1}((p - T''/T')/T') node-wise, blended as
/// T_next = (1-omega) T + omega H(T). No map inversion is needed because the
/// transported score is evaluated at image points.
FpStepResult fixed_point_step(const GridFunction& T, const ScoreModel& p,
                              const GridFunction& q_inv, double omega,
                              double tol_jac = kTolJacobian);

struct FpHistoryRow {
    int iter;
    double increment_sup;  // sup-node |T_{n+1} - T_n|
    long long clamped;
};

struct FpResult {
    GridFunction T;  // best iterate (smallest increment seen)
    std::vector<FpHistoryRow> history;
    bool converged = false;
    int iterations = 0;
};

/// Iterate from T0 = Id until the increment drops below tol, max_iters is
/// reached, or divergence is detected (increment growing 10x above the best
/// seen — the unrelaxed map amplifies grid-scale noise, so late iterates can
/// deteriorate; the best iterate is returned in that case).
FpResult run_fixed_point(const ScoreModel& p, const ScoreModel& q, const Grid& grid,
                         const FpOptions& opts = {});

}  // namespace kamtrans
