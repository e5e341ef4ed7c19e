#include "kamtrans/score.hpp"

#include <cmath>

#include "kamtrans/errors.hpp"

namespace kamtrans {

namespace {
double clamp_to_cap(double raw, double cap, std::atomic<long long>& counter) {
    if (std::isnan(raw)) throw DomainError("score evaluation produced NaN");
    if (raw > cap) {
        ++counter;
        return cap;
    }
    if (raw < -cap) {
        ++counter;
        return -cap;
    }
    return raw;
}
}  // namespace

ScoreModel ScoreModel::closed_form(std::string label, std::function<double(double)> eval,
                                   std::function<double(double)> deriv, double cap) {
    ScoreModel m;
    m.kind_ = Kind::closed_form;
    m.label_ = std::move(label);
    m.cap_ = cap;
    m.eval_ = std::move(eval);
    m.deriv_ = std::move(deriv);
    return m;
}

ScoreModel ScoreModel::from_grid(std::string label, GridFunction values, double cap,
                                 long long initial_clamp_count) {
    ScoreModel m;
    m.kind_ = Kind::gridded;
    m.label_ = std::move(label);
    m.cap_ = cap;
    m.gridded_ = std::move(values);
    m.eval_ = [gf = *m.gridded_](double x) { return gf(x); };
    m.deriv_ = [df = derivative(*m.gridded_)](double x) { return df(x); };
    m.counter_->store(initial_clamp_count);
    return m;
}

double ScoreModel::operator()(double x) const { return clamp_to_cap(eval_(x), cap_, *counter_); }

double ScoreModel::deriv(double x) const { return deriv_(x); }

const GridFunction& ScoreModel::grid_values() const {
    if (!gridded_) throw DomainError("ScoreModel '" + label_ + "' has no gridded representation");
    return *gridded_;
}

ScoreModel score_from_log_density(const std::string& label,
                                  const std::function<double(double)>& logrho, const Grid& grid,
                                  const std::function<double(double)>& dlogrho, double cap) {
    const int n = grid.n;
    const double h = grid.h();
    std::vector<double> s(static_cast<std::size_t>(n));
    long long clamped = 0;
    auto cap_value = [&](double raw, double sign_hint) {
        if (!std::isfinite(raw)) {
            ++clamped;
            return sign_hint >= 0 ? cap : -cap;
        }
        if (std::abs(raw) > cap) {
            ++clamped;
            return raw > 0 ? cap : -cap;
        }
        return raw;
    };

    if (dlogrho) {
        for (int i = 0; i < n; ++i) {
            const double raw = dlogrho(grid.node(i));
            if (i > 0 && i < n - 1 && !std::isfinite(raw))
                throw SingularDensityError(label + ": score singular at interior node " +
                                           std::to_string(i));
            s[static_cast<std::size_t>(i)] = cap_value(raw, raw);
        }
    } else {
        std::vector<double> L(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            L[static_cast<std::size_t>(i)] = logrho(grid.node(i));
            if (i > 0 && i < n - 1 && !std::isfinite(L[static_cast<std::size_t>(i)]))
                throw SingularDensityError(label + ": log-density is not finite at interior node " +
                                           std::to_string(i));
        }
        const bool left_ok = std::isfinite(L.front());
        const bool right_ok = std::isfinite(L.back());
        auto centered = [&](int i) {
            return (L[static_cast<std::size_t>(i + 1)] - L[static_cast<std::size_t>(i - 1)]) /
                   (2 * h);
        };
        auto forward = [&](int i) {  // one-sided second order into the interior
            return (-3 * L[static_cast<std::size_t>(i)] + 4 * L[static_cast<std::size_t>(i + 1)] -
                    L[static_cast<std::size_t>(i + 2)]) / (2 * h);
        };
        auto backward = [&](int i) {
            return (3 * L[static_cast<std::size_t>(i)] - 4 * L[static_cast<std::size_t>(i - 1)] +
                    L[static_cast<std::size_t>(i - 2)]) / (2 * h);
        };
        for (int i = 1; i < n - 1; ++i) {
            double raw;
            if (i == 1 && !left_ok)
                raw = forward(i);
            else if (i == n - 2 && !right_ok)
                raw = backward(i);
            else
                raw = centered(i);
            s[static_cast<std::size_t>(i)] = cap_value(raw, raw);
        }
        s.front() = left_ok ? cap_value(forward(0), forward(0)) : cap_value(INFINITY, s[1]);
        s.back() = right_ok ? cap_value(backward(n - 1), backward(n - 1))
                            : cap_value(INFINITY, s[static_cast<std::size_t>(n - 2)]);
    }

    return ScoreModel::from_grid(label, GridFunction(grid, std::move(s)), cap, clamped);
}

GridFunction score_operator_1d(const ScoreModel& s, const GridFunction& U, double tol_jac) {
    const Grid& g = U.grid();

    if (U.is_identity())
        return GridFunction(g, [&] {
            std::vector<double> v(static_cast<std::size_t>(g.n));
            for (int i = 0; i < g.n; ++i) v[static_cast<std::size_t>(i)] = s(g.node(i));
            return v;
        }(), Interp::linear, U.extrapolation());

    if (U.min_increment() <= 0.0) {
        const auto& v = U.values();
        for (std::size_t i = 0; i + 1 < v.size(); ++i)
            if (!(v[i + 1] - v[i] > 0.0))
                throw InvertibilityError("score_operator_1d: map not strictly increasing", i);
    }

    const GridFunction Up = derivative(U);
    for (int i = 0; i < g.n; ++i)
        if (std::abs(Up.value(i)) < tol_jac)
            throw DegenerateJacobianError("score_operator_1d: |U'| < tol_jac at node " +
                                          std::to_string(i));
    const GridFunction Upp = second_derivative(U);

    // tighter than the default map-inversion tolerance: the transported score
    // picks up |s'| times the inversion error
    const double tol = 1e-13 * (g.b - g.a);
    std::vector<double> out(static_cast<std::size_t>(g.n));
    for (int j = 0; j < g.n; ++j) {
        const double x = invert_at(U, g.node(j), tol);
        const double up = Up(x);
        if (std::abs(up) < tol_jac)
            throw DegenerateJacobianError("score_operator_1d: |U'| < tol_jac at x = " +
                                          std::to_string(x));
        out[static_cast<std::size_t>(j)] = score_transform_integrand(s(x), up, Upp(x));
    }
    return GridFunction(g, std::move(out), Interp::linear, U.extrapolation());
}

GridFunction score_residual(const ScoreModel& p, const TransportMap& T, const ScoreModel& q) {
    const GridFunction Tflat = flatten(T);
    const GridFunction gp = score_operator_1d(p, Tflat);
    std::vector<double> r(static_cast<std::size_t>(Tflat.grid().n));
    for (int i = 0; i < Tflat.grid().n; ++i)
        r[static_cast<std::size_t>(i)] = gp.value(i) - q(Tflat.grid().node(i));
    return GridFunction(Tflat.grid(), std::move(r));
}

GridFunction flatten(const TransportMap& T) {
    GridFunction f = GridFunction::identity(T.grid);
    for (const auto& v : T.stack) {
        std::vector<double> step(static_cast<std::size_t>(T.grid.n));
        for (int i = 0; i < T.grid.n; ++i)
            step[static_cast<std::size_t>(i)] = T.grid.node(i) + v.value(i);
        const GridFunction U(T.grid, std::move(step), Interp::monotone_cubic, v.extrapolation());
        f = compose(U, f);
    }
    if (!T.stack.empty() && f.min_increment() <= 0.0)
        throw FlattenError("flatten: composite map is not strictly increasing");
    return f;
}

}  // namespace kamtrans
