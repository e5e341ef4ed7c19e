#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace kamtrans {

/// Uniform grid of n nodes x_i = a + i*h on [a, b], h = (b-a)/(n-1).
struct Grid {
    double a;
    double b;
    int n;

    Grid(double a_, double b_, int n_);

    double h() const { return (b - a) / (n - 1); }
    double node(int i) const { return a + i * h(); }
    std::vector<double> nodes() const;

    bool operator==(const Grid&) const = default;
};

enum class Interp { linear, monotone_cubic };

/// Behavior of interp_eval outside [a, b]: `clamp` returns the boundary
/// value, `linear` extends with the boundary slope of the interpolant.
enum class Extrapolation { clamp, linear };

/// Scalar function sampled on a uniform grid. Immutable after construction;
/// evaluation, calculus and composition are pure.
///
/// The monotone-cubic mode uses Fritsch–Carlson slopes, so strictly
/// increasing node data yields a strictly increasing interpolant (the
/// property transport maps need to stay invertible between nodes).
class GridFunction {
public:
    GridFunction(Grid grid, std::vector<double> values,
                 Interp interp = Interp::linear,
                 Extrapolation extrap = Extrapolation::clamp);

    static GridFunction identity(const Grid& g,
                                 Interp interp = Interp::monotone_cubic,
                                 Extrapolation extrap = Extrapolation::clamp);
    static GridFunction constant(const Grid& g, double c,
                                 Interp interp = Interp::linear,
                                 Extrapolation extrap = Extrapolation::clamp);
    static GridFunction sample(const Grid& g, const std::function<double(double)>& f,
                               Interp interp = Interp::linear,
                               Extrapolation extrap = Extrapolation::clamp);

    const Grid& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    double value(int i) const { return values_[static_cast<std::size_t>(i)]; }
    Interp interp() const { return interp_; }
    Extrapolation extrapolation() const { return extrap_; }

    /// Interpolant value at x; extrapolation policy applies outside [a, b].
    /// Throws DomainError for non-finite x.
    double operator()(double x) const;

    /// True when the values are exactly the grid nodes (the identity map).
    bool is_identity() const;

    /// Min over i of values[i+1] - values[i].
    double min_increment() const;

    GridFunction with_interp(Interp interp) const;
    GridFunction with_extrapolation(Extrapolation extrap) const;

private:
    Grid grid_;
    std::vector<double> values_;
    Interp interp_;
    Extrapolation extrap_;
    std::vector<double> slopes_;  // Hermite node slopes (monotone_cubic only)
};

/// Second-order finite-difference derivative: centered stencils at interior
/// nodes, one-sided second-order stencils at the endpoints. The result is a
/// linear-interp GridFunction carrying the input's extrapolation policy.
GridFunction derivative(const GridFunction& f);
GridFunction second_derivative(const GridFunction& f);

/// Node-wise composition (f∘g)(x_i) = f(g(x_i)) on g's grid.
GridFunction compose(const GridFunction& f, const GridFunction& g);

/// Default inversion tolerance: 1e-10 * (b - a).
double default_inversion_tol(const Grid& g);

/// Solve T(x) = y by bisection on the monotone interpolant. Queries outside
/// [T(a), T(b)] are clamped unless T extrapolates linearly, in which case the
/// bracket is extended. Throws InvertibilityError if T is not strictly
/// increasing at nodes.
double invert_at(const GridFunction& T, double y, double tol = -1.0);

/// Inverse map of a strictly increasing T, as a GridFunction on the range
/// grid {T(a), T(b), n}, satisfying |T(S(y)) - y| <= tol at its nodes.
GridFunction invert_monotone(const GridFunction& T, double tol = -1.0);

/// Sup norm over interior nodes i = 1..n-2.
double sup_norm_interior(const GridFunction& f);
double sup_norm_interior(const std::vector<double>& values);
/// Grid-weighted L2 norm over interior nodes: sqrt(h * sum v_i^2).
double l2_norm_interior(const GridFunction& f);

/// CSV with header `x,value`, one node per row, 17 significant digits.
void write_csv(const GridFunction& f, std::ostream& os);
void write_csv(const GridFunction& f, const std::string& path);
/// Parse `x,value` CSV back into a GridFunction (nodes must be uniform).
GridFunction read_csv(std::istream& is, Interp interp = Interp::linear);
GridFunction read_csv_file(const std::string& path, Interp interp = Interp::linear);

/// Shortest representation of x that round-trips a double (used by all CSV
/// writers so identical runs produce byte-identical files).
std::string format_double(double x);

}  // namespace kamtrans
