#include "kamtrans/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "kamtrans/errors.hpp"

namespace kamtrans {

Grid::Grid(double a_, double b_, int n_) : a(a_), b(b_), n(n_) {
    if (!std::isfinite(a) || !std::isfinite(b)) throw DomainError("grid endpoints must be finite");
    if (!(a < b)) throw DomainError("grid requires a < b");
    if (n < 3) throw DomainError("grid requires n >= 3");
}

std::vector<double> Grid::nodes() const {
    std::vector<double> xs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = node(i);
    return xs;
}

namespace {

// Fritsch-Carlson slopes on a uniform grid. Monotone data produce a monotone
// C^1 interpolant.
std::vector<double> pchip_slopes(const Grid& g, const std::vector<double>& y) {
    const int n = g.n;
    const double h = g.h();
    std::vector<double> d(static_cast<std::size_t>(n));
    std::vector<double> sec(static_cast<std::size_t>(n - 1));
    for (int i = 0; i + 1 < n; ++i) sec[i] = (y[i + 1] - y[i]) / h;

    for (int i = 1; i + 1 < n; ++i) {
        const double s0 = sec[i - 1], s1 = sec[i];
        if (s0 == 0.0 || s1 == 0.0 || (s0 > 0) != (s1 > 0)) {
            d[i] = 0.0;
        } else {
            d[i] = 2.0 * s0 * s1 / (s0 + s1);  // harmonic mean (uniform spacing)
        }
    }
    auto end_slope = [](double s_near, double s_far) {
        double d0 = (3.0 * s_near - s_far) / 2.0;
        if (d0 == 0.0 || s_near == 0.0 || (d0 > 0) != (s_near > 0)) return 0.0;
        if ((s_near > 0) != (s_far > 0) && std::abs(d0) > 3.0 * std::abs(s_near))
            return 3.0 * s_near;
        return d0;
    };
    d[0] = end_slope(sec[0], sec[1]);
    d[static_cast<std::size_t>(n - 1)] = end_slope(sec[n - 2], sec[n - 3]);
    return d;
}

}  // namespace

GridFunction::GridFunction(Grid grid, std::vector<double> values, Interp interp,
                           Extrapolation extrap)
    : grid_(grid), values_(std::move(values)), interp_(interp), extrap_(extrap) {
    if (values_.size() != static_cast<std::size_t>(grid_.n))
        throw DomainError("GridFunction: values length must equal grid.n");
    for (double v : values_)
        if (!std::isfinite(v)) throw DomainError("GridFunction: values must be finite");
    if (interp_ == Interp::monotone_cubic) slopes_ = pchip_slopes(grid_, values_);
}

GridFunction GridFunction::identity(const Grid& g, Interp interp, Extrapolation extrap) {
    return GridFunction(g, g.nodes(), interp, extrap);
}

GridFunction GridFunction::constant(const Grid& g, double c, Interp interp,
                                    Extrapolation extrap) {
    return GridFunction(g, std::vector<double>(static_cast<std::size_t>(g.n), c), interp, extrap);
}

GridFunction GridFunction::sample(const Grid& g, const std::function<double(double)>& f,
                                  Interp interp, Extrapolation extrap) {
    std::vector<double> v(static_cast<std::size_t>(g.n));
    for (int i = 0; i < g.n; ++i) v[static_cast<std::size_t>(i)] = f(g.node(i));
    return GridFunction(g, std::move(v), interp, extrap);
}

double GridFunction::operator()(double x) const {
    if (!std::isfinite(x)) throw DomainError("interp_eval: non-finite x");
    const int n = grid_.n;
    const double h = grid_.h();

    if (x <= grid_.a || x >= grid_.b) {
        const bool left = x <= grid_.a;
        const double xb = left ? grid_.a : grid_.b;
        const double yb = left ? values_.front() : values_.back();
        if (extrap_ == Extrapolation::clamp || x == xb) return yb;
        double slope;
        if (interp_ == Interp::monotone_cubic) {
            slope = left ? slopes_.front() : slopes_.back();
        } else {
            slope = left ? (values_[1] - values_[0]) / h
                         : (values_[static_cast<std::size_t>(n - 1)] -
                            values_[static_cast<std::size_t>(n - 2)]) / h;
        }
        return yb + slope * (x - xb);
    }

    int k = static_cast<int>((x - grid_.a) / h);
    k = std::clamp(k, 0, n - 2);
    const double xk = grid_.node(k);
    const double t = (x - xk) / h;
    const double y0 = values_[static_cast<std::size_t>(k)];
    const double y1 = values_[static_cast<std::size_t>(k + 1)];

    if (interp_ == Interp::linear) return y0 + t * (y1 - y0);

    // cubic Hermite basis
    const double d0 = slopes_[static_cast<std::size_t>(k)] * h;
    const double d1 = slopes_[static_cast<std::size_t>(k + 1)] * h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * d0 +
           (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * d1;
}

bool GridFunction::is_identity() const {
    for (int i = 0; i < grid_.n; ++i)
        if (values_[static_cast<std::size_t>(i)] != grid_.node(i)) return false;
    return true;
}

double GridFunction::min_increment() const {
    double m = values_[1] - values_[0];
    for (std::size_t i = 1; i + 1 < values_.size(); ++i)
        m = std::min(m, values_[i + 1] - values_[i]);
    return m;
}

GridFunction GridFunction::with_interp(Interp interp) const {
    return GridFunction(grid_, values_, interp, extrap_);
}

GridFunction GridFunction::with_extrapolation(Extrapolation extrap) const {
    return GridFunction(grid_, values_, interp_, extrap);
}

GridFunction derivative(const GridFunction& f) {
    const Grid& g = f.grid();
    const int n = g.n;
    const double h = g.h();
    const auto& y = f.values();
    std::vector<double> d(static_cast<std::size_t>(n));
    for (int i = 1; i + 1 < n; ++i)
        d[static_cast<std::size_t>(i)] = (y[static_cast<std::size_t>(i + 1)] -
                                          y[static_cast<std::size_t>(i - 1)]) / (2 * h);
    d[0] = (-3 * y[0] + 4 * y[1] - y[2]) / (2 * h);
    d[static_cast<std::size_t>(n - 1)] =
        (3 * y[static_cast<std::size_t>(n - 1)] - 4 * y[static_cast<std::size_t>(n - 2)] +
         y[static_cast<std::size_t>(n - 3)]) / (2 * h);
    return GridFunction(g, std::move(d), Interp::linear, f.extrapolation());
}

GridFunction second_derivative(const GridFunction& f) {
    const Grid& g = f.grid();
    const int n = g.n;
    const double h2 = g.h() * g.h();
    const auto& y = f.values();
    std::vector<double> d(static_cast<std::size_t>(n));
    for (int i = 1; i + 1 < n; ++i)
        d[static_cast<std::size_t>(i)] =
            (y[static_cast<std::size_t>(i + 1)] - 2 * y[static_cast<std::size_t>(i)] +
             y[static_cast<std::size_t>(i - 1)]) / h2;
    if (n >= 4) {
        d[0] = (2 * y[0] - 5 * y[1] + 4 * y[2] - y[3]) / h2;
        d[static_cast<std::size_t>(n - 1)] =
            (2 * y[static_cast<std::size_t>(n - 1)] - 5 * y[static_cast<std::size_t>(n - 2)] +
             4 * y[static_cast<std::size_t>(n - 3)] - y[static_cast<std::size_t>(n - 4)]) / h2;
    } else {
        d[0] = d[1];
        d[2] = d[1];
    }
    return GridFunction(g, std::move(d), Interp::linear, f.extrapolation());
}

GridFunction compose(const GridFunction& f, const GridFunction& g) {
    std::vector<double> v(static_cast<std::size_t>(g.grid().n));
    for (int i = 0; i < g.grid().n; ++i)
        v[static_cast<std::size_t>(i)] = f(g.value(i));
    return GridFunction(g.grid(), std::move(v), f.interp(), f.extrapolation());
}

double default_inversion_tol(const Grid& g) { return 1e-10 * (g.b - g.a); }

namespace {
constexpr int kBisectionCap = 200;

void require_increasing(const GridFunction& T, const char* what) {
    const auto& v = T.values();
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
        if (!(v[i + 1] - v[i] > 0.0))
            throw InvertibilityError(std::string(what) + ": map not strictly increasing", i);
}
}  // namespace

double invert_at(const GridFunction& T, double y, double tol) {
    if (!std::isfinite(y)) throw DomainError("invert_at: non-finite y");
    require_increasing(T, "invert_at");
    if (tol <= 0) tol = default_inversion_tol(T.grid());

    double lo = T.grid().a, hi = T.grid().b;
    const double ta = T.values().front(), tb = T.values().back();
    if (y <= ta) {
        if (T.extrapolation() == Extrapolation::clamp) return lo;
        double span = hi - lo;
        while (T(lo) > y) {
            lo -= span;
            span *= 2;
            if (!std::isfinite(lo)) throw InvertibilityError("invert_at: bracket expansion failed", 0);
        }
        hi = T.grid().a;
    } else if (y >= tb) {
        if (T.extrapolation() == Extrapolation::clamp) return hi;
        double span = hi - lo;
        while (T(hi) < y) {
            hi += span;
            span *= 2;
            if (!std::isfinite(hi))
                throw InvertibilityError("invert_at: bracket expansion failed",
                                         static_cast<std::size_t>(T.grid().n - 1));
        }
        lo = T.grid().b;
    }
    for (int it = 0; it < kBisectionCap && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (T(mid) < y)
            lo = mid;
        else
            hi = mid;
    }
    // secant refinement inside the final bracket: curvature-limited, so the
    // returned point is far more accurate than the bracket width
    const double flo = T(lo), fhi = T(hi);
    if (fhi > flo) {
        const double x = lo + (hi - lo) * (y - flo) / (fhi - flo);
        if (x >= lo && x <= hi) return x;
    }
    return 0.5 * (lo + hi);
}

GridFunction invert_monotone(const GridFunction& T, double tol) {
    require_increasing(T, "invert_monotone");
    if (tol <= 0) tol = default_inversion_tol(T.grid());
    const Grid range(T.values().front(), T.values().back(), T.grid().n);
    std::vector<double> s(static_cast<std::size_t>(range.n));
    for (int j = 0; j < range.n; ++j)
        s[static_cast<std::size_t>(j)] = invert_at(T, range.node(j), tol);
    // endpoints are exact by construction
    s.front() = T.grid().a;
    s.back() = T.grid().b;
    return GridFunction(range, std::move(s), T.interp(), T.extrapolation());
}

double sup_norm_interior(const std::vector<double>& values) {
    double m = 0.0;
    for (std::size_t i = 1; i + 1 < values.size(); ++i) m = std::max(m, std::abs(values[i]));
    return m;
}

double sup_norm_interior(const GridFunction& f) { return sup_norm_interior(f.values()); }

double l2_norm_interior(const GridFunction& f) {
    double s = 0.0;
    const auto& v = f.values();
    for (std::size_t i = 1; i + 1 < v.size(); ++i) s += v[i] * v[i];
    return std::sqrt(f.grid().h() * s);
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_csv(const GridFunction& f, std::ostream& os) {
    os << "x,value\n";
    for (int i = 0; i < f.grid().n; ++i)
        os << format_double(f.grid().node(i)) << ',' << format_double(f.value(i)) << '\n';
}

void write_csv(const GridFunction& f, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw DomainError("cannot open " + path + " for writing");
    write_csv(f, os);
}

GridFunction read_csv(std::istream& is, Interp interp) {
    std::string line;
    std::vector<double> xs, ys;
    bool header = true;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            if (line.rfind("x,", 0) == 0) continue;  // header row
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw DomainError("CSV row missing comma: " + line);
        xs.push_back(std::stod(line.substr(0, comma)));
        ys.push_back(std::stod(line.substr(comma + 1)));
    }
    if (xs.size() < 3) throw DomainError("CSV needs at least 3 rows");
    const int n = static_cast<int>(xs.size());
    const Grid g(xs.front(), xs.back(), n);
    for (int i = 0; i < n; ++i)
        if (std::abs(xs[static_cast<std::size_t>(i)] - g.node(i)) > 1e-9 * (g.b - g.a))
            throw DomainError("CSV nodes are not a uniform grid");
    return GridFunction(g, std::move(ys), interp);
}

GridFunction read_csv_file(const std::string& path, Interp interp) {
    std::ifstream is(path);
    if (!is) throw DomainError("cannot open " + path);
    return read_csv(is, interp);
}

}  // namespace kamtrans
