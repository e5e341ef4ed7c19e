#pragma once

#include <iosfwd>
#include <vector>

namespace kamtrans {

/// Closed-form state of the affine-Gaussian iteration. The running score is
/// p_n(x) = a_n x + b_n, the step map is Id + v_n = A_n x + B_n, and the
/// target score is q(x) = -(x - m)/sigma^2. At the fixed point
/// a = -1/sigma^2, b = m/sigma^2, A = 1, B = 0.
struct AffineState {
    double a;
    double b;
    double A;  // filled by affine_step
    double B;
    double m;
    double sigma;
};

/// One Newton step in closed form:
///   A = -a s^2/2 + 1/2,  B = -b s^2 + m/2 - a m s^2/2        (s = sigma)
///   a' = a/A^2,          b' = b/A - a B/A^2
/// The b-update follows from pushing the affine score through the affine
/// map: p'(y) = (a/A^2) y + b/A - a B/A^2. Throws on A = 0.
AffineState affine_step(const AffineState& st);

struct AffineTrajectory {
    std::vector<AffineState> states;  // states[n] holds (a_n, b_n, A_n, B_n)
    double map_slope;                 // flattened T after all steps
    double map_intercept;
};

/// Run n_iters steps from (a0, b0); the flattened map composes the affine
/// factors left to right.
AffineTrajectory run_affine(double m, double sigma, double a0, double b0, int n_iters);

/// Trajectory CSV: `n,a,b,A,B,err_a,err_b` with err_a = |a_n + 1/sigma^2|,
/// err_b = |b_n - m/sigma^2|.
void write_affine_csv(const AffineTrajectory& traj, std::ostream& os);

}  // namespace kamtrans
