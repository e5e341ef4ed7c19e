#include "kamtrans/gaussian_affine.hpp"

#include <cmath>
#include <ostream>

#include "kamtrans/errors.hpp"
#include "kamtrans/grid.hpp"

namespace kamtrans {

AffineState affine_step(const AffineState& st) {
    const double s2 = st.sigma * st.sigma;
    const double A = -st.a * s2 / 2.0 + 0.5;
    const double B = -st.b * s2 + st.m / 2.0 - st.a * st.m * s2 / 2.0;
    if (A == 0.0) throw DomainError("affine_step: degenerate step (A = 0)");
    AffineState next = st;
    next.A = A;
    next.B = B;
    next.a = st.a / (A * A);
    next.b = st.b / A - st.a * B / (A * A);
    return next;
}

AffineTrajectory run_affine(double m, double sigma, double a0, double b0, int n_iters) {
    if (n_iters < 1) throw DomainError("run_affine: n_iters must be >= 1");
    AffineTrajectory traj;
    traj.map_slope = 1.0;
    traj.map_intercept = 0.0;
    AffineState st{a0, b0, 0.0, 0.0, m, sigma};
    for (int n = 0; n < n_iters; ++n) {
        const AffineState next = affine_step(st);
        // record the state whose step coefficients were just computed
        AffineState rec = st;
        rec.A = next.A;
        rec.B = next.B;
        traj.states.push_back(rec);
        // T_{n+1} = (A x + B) ∘ T_n
        traj.map_slope *= next.A;
        traj.map_intercept = next.A * traj.map_intercept + next.B;
        st = next;
    }
    // final state, with the step that would follow it
    const AffineState peek = affine_step(st);
    AffineState last = st;
    last.A = peek.A;
    last.B = peek.B;
    traj.states.push_back(last);
    return traj;
}

void write_affine_csv(const AffineTrajectory& traj, std::ostream& os) {
    os << "n,a,b,A,B,err_a,err_b\n";
    for (std::size_t n = 0; n < traj.states.size(); ++n) {
        const AffineState& st = traj.states[n];
        const double s2 = st.sigma * st.sigma;
        os << n << ',' << format_double(st.a) << ',' << format_double(st.b) << ','
           << format_double(st.A) << ',' << format_double(st.B) << ','
           << format_double(std::abs(st.a + 1.0 / s2)) << ','
           << format_double(std::abs(st.b - st.m / s2)) << '\n';
    }
}

}  // namespace kamtrans
