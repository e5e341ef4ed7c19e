#pragma once

#include <functional>
#include <string>
#include <vector>

#include "kamtrans/grid.hpp"

namespace kamtrans {

/// Normalized 1D density on [a, b], built from an unnormalized density
/// function. The normalization constant comes from adaptive Simpson
/// quadrature (relative error <= 1e-10); the CDF is cached on a fine grid
/// (default 4096 panels) with per-query partial-panel correction, so
/// |cdf(quantile(u)) - u| <= 1e-8 holds with a wide margin.
class Density1D {
public:
    Density1D(std::string label, std::function<double(double)> unnormalized, double a, double b,
              int cache_panels = 4096);

    const std::string& label() const { return label_; }
    double a() const { return a_; }
    double b() const { return b_; }
    /// Normalization constant of the unnormalized density.
    double normalization() const { return z_; }
    /// Normalized density value at x (0 outside [a, b]).
    double pdf(double x) const;

    double cdf(double x) const;
    /// Inverse CDF; quantile(0) = a and quantile(1) = b exactly.
    /// Throws DomainError for u outside [0, 1].
    double quantile(double u) const;

private:
    std::string label_;
    std::function<double(double)> rho_;
    double a_, b_;
    int panels_;
    double z_;                    // adaptive-Simpson normalization
    double cache_total_;          // composite-Simpson total used to normalize the CDF
    std::vector<double> cumulative_;  // cumulative[k] = integral over first k panels
};

/// Adaptive Simpson integral of f over [a, b] to the given relative
/// tolerance (absolute floor 1e-300).
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol = 1e-10);

/// Monotone OT map T(x) = quantile_nu(cdf_mu(x)) sampled on the working grid.
GridFunction increasing_rearrangement(const Density1D& mu, const Density1D& nu, const Grid& grid);

struct QuadratureResult {
    double value;
    double error_estimate;
};

/// W1(mu, nu) = integral over [0,1] of |quantile_mu - quantile_nu|,
/// composite Simpson over 4096 quantile nodes with a refinement-based
/// error estimate.
QuadratureResult wasserstein1(const Density1D& mu, const Density1D& nu);

/// W1 between T♯mu and nu (the pushforward quantile is T ∘ quantile_mu).
QuadratureResult wasserstein1_pushforward(const Density1D& mu, const GridFunction& T,
                                          const Density1D& nu);

}  // namespace kamtrans
