#pragma once

#include <functional>
#include <string>
#include <vector>

namespace kamtrans {

/// Small dense row-major matrix for the point-jet algebra (d is 1..a few).
struct Mat {
    int d = 0;
    std::vector<double> a;

    Mat() = default;
    explicit Mat(int d_) : d(d_), a(static_cast<std::size_t>(d_) * d_, 0.0) {}
    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i * d + j)]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i * d + j)]; }
    static Mat identity(int d);
};

using Vec = std::vector<double>;
using MapFn = std::function<Vec(const Vec&)>;
using JacFn = std::function<Mat(const Vec&)>;
using ScoreFn = std::function<Vec(const Vec&)>;

/// Second-order data of a map U and a score s at one point:
/// J(k,l) = ∂_l U_k and H[k] = Hessian of the k-th component (symmetric).
struct PointJet {
    Vec x;
    Vec score;           // s(x), as a row vector
    Mat J;               // ∇U(x)
    std::vector<Mat> H;  // H[k](i,l) = ∂_i ∂_l U_k
};

/// The transported score at the image point U(x):
///   s J^{-1} - t J^{-1},  t_i = tr(J^{-1} ∂_i J),  (∂_i J)(k,l) = H[k](i,l).
/// Uses linear solves against J (no explicit inverse); throws
/// DegenerateJacobianError when |det J| < tol_det.
Vec pushforward_score_at_point(const PointJet& jet, double tol_det = 1e-10);

/// Build a jet at x: J and H analytically differenced from grad_u when
/// given, otherwise from central differences of u (step eps^{1/3} max(1,|x|)
/// for first derivatives, eps^{1/5} max(1,|x|) for the second-derivative
/// stencils).
PointJet jet_from_map(const MapFn& u, const JacFn& grad_u, const Vec& x, const ScoreFn& s);

/// Jet of (u1 ∘ u2) at x from the jets of u2 at x and u1 at u2(x), by the
/// chain rule. Independent route for the composition property check.
PointJet compose_jets(const PointJet& outer, const PointJet& inner);

/// max_{k,i,l} |H[k](i,l) - H[k](l,i)| — the symmetry defect of the jet.
double hessian_asymmetry(const PointJet& jet);

struct NdCheck {
    std::string name;
    bool pass;
    double measure;    // achieved error
    double tolerance;  // allowed
};

/// The invariant suite behind the `check-nd` subcommand: exact identities on
/// built-in maps (identity, rotation, diagonal scaling, a shear-like
/// nonlinear map), jet symmetry, the pointwise composition property, and the
/// d=1 reduction against the 1D operator's integrand.
std::vector<NdCheck> run_nd_checks();

}  // namespace kamtrans
