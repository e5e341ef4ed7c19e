#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "kamtrans/grid.hpp"
#include "kamtrans/transport_map.hpp"

namespace kamtrans {

inline constexpr double kScoreCap = 1e6;
inline constexpr double kTolJacobian = 1e-8;

/// A score (d/dx log density) with first-derivative access. Either a
/// closed-form pair of evaluators or a gridded function whose derivative
/// comes from finite differences. Values are clamped to +-cap with a
/// warning counter, so singular catalog scores (which blow up like 1/x
/// where the density vanishes) stay finite at every queried point.
class ScoreModel {
public:
    enum class Kind { closed_form, gridded };

    static ScoreModel closed_form(std::string label, std::function<double(double)> eval,
                                  std::function<double(double)> deriv, double cap = kScoreCap);
    static ScoreModel from_grid(std::string label, GridFunction values, double cap = kScoreCap,
                                long long initial_clamp_count = 0);

    double operator()(double x) const;
    double deriv(double x) const;

    Kind kind() const { return kind_; }
    const std::string& label() const { return label_; }
    double cap() const { return cap_; }
    /// Number of evaluations clamped to +-cap so far.
    long long clamp_count() const { return counter_->load(); }

    /// The gridded representation (gridded models only).
    const GridFunction& grid_values() const;

private:
    ScoreModel() = default;

    Kind kind_ = Kind::closed_form;
    std::string label_;
    double cap_ = kScoreCap;
    std::function<double(double)> eval_;
    std::function<double(double)> deriv_;
    std::optional<GridFunction> gridded_;
    std::shared_ptr<std::atomic<long long>> counter_ =
        std::make_shared<std::atomic<long long>>(0);
};

/// Score of the density exp(logrho) sampled on the grid: the analytic
/// derivative when given, otherwise second-order differences of logrho.
/// Invariant under logrho -> logrho + const. Throws SingularDensityError
/// when logrho is not finite at an interior node; non-finite endpoint
/// scores are clamped with the warning counter.
ScoreModel score_from_log_density(const std::string& label,
                                  const std::function<double(double)>& logrho, const Grid& grid,
                                  const std::function<double(double)>& dlogrho = nullptr,
                                  double cap = kScoreCap);

/// 1D score transformation: the score of U♯(measure of s), resampled onto
/// U's grid. At a working node y, with x = U^{-1}(y),
///     out(y) = (s(x) - U''(x)/U'(x)) / U'(x).
/// U must be strictly increasing with min U' >= tol_jac (throws
/// DegenerateJacobianError otherwise). If U is exactly the identity the
/// result is s sampled at the nodes.
GridFunction score_operator_1d(const ScoreModel& s, const GridFunction& U,
                               double tol_jac = kTolJacobian);

/// The scalar transform (s(x) - U''/U') / U' — the value the operator
/// attaches to the image point U(x).
inline double score_transform_integrand(double s_at_x, double uprime, double usecond) {
    return (s_at_x - usecond / uprime) / uprime;
}

/// Score residual G(p, T) - q on T's grid. Endpoint values are computed but
/// all norms downstream use interior nodes only.
GridFunction score_residual(const ScoreModel& p, const TransportMap& T, const ScoreModel& q);

}  // namespace kamtrans
