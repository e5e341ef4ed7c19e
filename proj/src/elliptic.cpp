#include "kamtrans/elliptic.hpp"

#include <cmath>
#include <ostream>

#include "kamtrans/errors.hpp"

namespace kamtrans {

double lu_factor(std::vector<double>& a, std::vector<int>& piv, int n) {
    piv.resize(static_cast<std::size_t>(n));
    double pmax = 0.0, pmin = INFINITY;
    for (int k = 0; k < n; ++k) {
        int imax = k;
        double vmax = std::abs(a[static_cast<std::size_t>(k * n + k)]);
        for (int i = k + 1; i < n; ++i) {
            const double v = std::abs(a[static_cast<std::size_t>(i * n + k)]);
            if (v > vmax) {
                vmax = v;
                imax = i;
            }
        }
        piv[static_cast<std::size_t>(k)] = imax;
        if (vmax == 0.0) throw SingularOperatorError("dense LU: zero pivot column", INFINITY);
        if (imax != k)
            for (int j = 0; j < n; ++j)
                std::swap(a[static_cast<std::size_t>(k * n + j)],
                          a[static_cast<std::size_t>(imax * n + j)]);
        const double pivot = a[static_cast<std::size_t>(k * n + k)];
        pmax = std::max(pmax, std::abs(pivot));
        pmin = std::min(pmin, std::abs(pivot));
        for (int i = k + 1; i < n; ++i) {
            const double m = a[static_cast<std::size_t>(i * n + k)] / pivot;
            a[static_cast<std::size_t>(i * n + k)] = m;
            for (int j = k + 1; j < n; ++j)
                a[static_cast<std::size_t>(i * n + j)] -= m * a[static_cast<std::size_t>(k * n + j)];
        }
    }
    return pmax / pmin;
}

void lu_solve(const std::vector<double>& lu, const std::vector<int>& piv, int n,
              std::vector<double>& rhs) {
    // P A = L U with the stored L consistent with the fully permuted rows, so
    // all row interchanges are applied to the rhs before the forward solve
    for (int k = 0; k < n; ++k)
        if (piv[static_cast<std::size_t>(k)] != k)
            std::swap(rhs[static_cast<std::size_t>(k)],
                      rhs[static_cast<std::size_t>(piv[static_cast<std::size_t>(k)])]);
    for (int k = 0; k < n; ++k)
        for (int i = k + 1; i < n; ++i)
            rhs[static_cast<std::size_t>(i)] -=
                lu[static_cast<std::size_t>(i * n + k)] * rhs[static_cast<std::size_t>(k)];
    for (int i = n - 1; i >= 0; --i) {
        double s = rhs[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < n; ++j)
            s -= lu[static_cast<std::size_t>(i * n + j)] * rhs[static_cast<std::size_t>(j)];
        rhs[static_cast<std::size_t>(i)] = s / lu[static_cast<std::size_t>(i * n + i)];
    }
}

EllipticOperator::EllipticOperator(const ScoreModel& q, const Grid& grid, BoundaryCondition bc)
    : grid_(grid), bc_(bc) {
    const int n = grid.n;
    const double h = grid.h();
    const double h2 = h * h;
    const int m = n - 2;  // interior unknowns

    q_vals_.resize(static_cast<std::size_t>(m));
    qprime_vals_.resize(static_cast<std::size_t>(m));
    sub_.resize(static_cast<std::size_t>(m));
    diag_.resize(static_cast<std::size_t>(m));
    super_.resize(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) {
        const double x = grid.node(k + 1);
        const double qi = q(x);
        const double qpi = q.deriv(x);
        if (!std::isfinite(qi) || !std::isfinite(qpi))
            throw AssemblyError("assemble: target score singular at interior node " +
                                std::to_string(k + 1));
        q_vals_[static_cast<std::size_t>(k)] = qi;
        qprime_vals_[static_cast<std::size_t>(k)] = qpi;
        sub_[static_cast<std::size_t>(k)] = 1.0 / h2 - qi / (2 * h);
        diag_[static_cast<std::size_t>(k)] = -2.0 / h2 + qpi;
        super_[static_cast<std::size_t>(k)] = 1.0 / h2 + qi / (2 * h);
    }

    if (bc_ == BoundaryCondition::free_collocation) {
        // full n x n collocation; rows 0 and n-1 use one-sided stencils
        dense_matrix_.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
        auto at = [&](int i, int j) -> double& {
            return dense_matrix_[static_cast<std::size_t>(i * n + j)];
        };
        for (int k = 0; k < m; ++k) {
            at(k + 1, k) = sub_[static_cast<std::size_t>(k)];
            at(k + 1, k + 1) = diag_[static_cast<std::size_t>(k)];
            at(k + 1, k + 2) = super_[static_cast<std::size_t>(k)];
        }
        const double q0 = q(grid.node(0)), qp0 = q.deriv(grid.node(0));
        const double q1 = q(grid.node(n - 1)), qp1 = q.deriv(grid.node(n - 1));
        if (!std::isfinite(q0) || !std::isfinite(qp0) || !std::isfinite(q1) || !std::isfinite(qp1))
            throw AssemblyError("assemble (free): target score singular at a boundary node");
        // v''(x0) ~ (2v0 - 5v1 + 4v2 - v3)/h^2, v'(x0) ~ (-3v0 + 4v1 - v2)/(2h)
        at(0, 0) = 2.0 / h2 + q0 * (-3.0) / (2 * h) + qp0;
        at(0, 1) = -5.0 / h2 + q0 * 4.0 / (2 * h);
        at(0, 2) = 4.0 / h2 + q0 * (-1.0) / (2 * h);
        at(0, 3) = -1.0 / h2;
        at(n - 1, n - 1) = 2.0 / h2 + q1 * 3.0 / (2 * h) + qp1;
        at(n - 1, n - 2) = -5.0 / h2 + q1 * (-4.0) / (2 * h);
        at(n - 1, n - 3) = 4.0 / h2 + q1 * 1.0 / (2 * h);
        at(n - 1, n - 4) = -1.0 / h2;
    }
}

void EllipticOperator::factor_dense() const {
    if (dense_ready_) return;
    const int n = grid_.n;
    const int m = n - 2;
    if (bc_ == BoundaryCondition::free_collocation) {
        dense_lu_ = dense_matrix_;
        lu_factor(dense_lu_, dense_piv_, n);
    } else {
        dense_lu_.assign(static_cast<std::size_t>(m) * static_cast<std::size_t>(m), 0.0);
        for (int k = 0; k < m; ++k) {
            if (k > 0) dense_lu_[static_cast<std::size_t>(k * m + k - 1)] = sub_[static_cast<std::size_t>(k)];
            dense_lu_[static_cast<std::size_t>(k * m + k)] = diag_[static_cast<std::size_t>(k)];
            if (k + 1 < m)
                dense_lu_[static_cast<std::size_t>(k * m + k + 1)] = super_[static_cast<std::size_t>(k)];
        }
        lu_factor(dense_lu_, dense_piv_, m);
    }
    dense_ready_ = true;
}

GridFunction EllipticOperator::solve(const GridFunction& f) const { return solve(f.values()); }

GridFunction EllipticOperator::solve(const std::vector<double>& f_nodes) const {
    const int n = grid_.n;
    if (f_nodes.size() != static_cast<std::size_t>(n))
        throw DomainError("elliptic solve: rhs length must equal grid.n");
    for (int i = 1; i < n - 1; ++i)
        if (!std::isfinite(f_nodes[static_cast<std::size_t>(i)]))
            throw DomainError("elliptic solve: rhs not finite at interior node " + std::to_string(i));

    if (bc_ == BoundaryCondition::free_collocation) {
        factor_dense();
        std::vector<double> v = f_nodes;
        lu_solve(dense_lu_, dense_piv_, n, v);
        return GridFunction(grid_, std::move(v));
    }

    const int m = n - 2;
    // Thomas elimination; fall back to dense LU when a pivot degenerates.
    double band_max = 0.0;
    for (int k = 0; k < m; ++k)
        band_max = std::max({band_max, std::abs(sub_[static_cast<std::size_t>(k)]),
                             std::abs(diag_[static_cast<std::size_t>(k)]),
                             std::abs(super_[static_cast<std::size_t>(k)])});
    const double pivot_floor = 1e-12 * band_max;

    std::vector<double> c(static_cast<std::size_t>(m)), d(static_cast<std::size_t>(m));
    bool ok = true;
    {
        double denom = diag_[0];
        if (std::abs(denom) < pivot_floor) ok = false;
        if (ok) {
            c[0] = super_[0] / denom;
            d[0] = f_nodes[1] / denom;
            for (int k = 1; k < m && ok; ++k) {
                denom = diag_[static_cast<std::size_t>(k)] -
                        sub_[static_cast<std::size_t>(k)] * c[static_cast<std::size_t>(k - 1)];
                if (std::abs(denom) < pivot_floor) {
                    ok = false;
                    break;
                }
                c[static_cast<std::size_t>(k)] = super_[static_cast<std::size_t>(k)] / denom;
                d[static_cast<std::size_t>(k)] =
                    (f_nodes[static_cast<std::size_t>(k + 1)] -
                     sub_[static_cast<std::size_t>(k)] * d[static_cast<std::size_t>(k - 1)]) / denom;
            }
        }
    }

    std::vector<double> v(static_cast<std::size_t>(n), 0.0);
    if (ok) {
        v[static_cast<std::size_t>(m)] = d[static_cast<std::size_t>(m - 1)];
        for (int k = m - 2; k >= 0; --k)
            v[static_cast<std::size_t>(k + 1)] =
                d[static_cast<std::size_t>(k)] -
                c[static_cast<std::size_t>(k)] * v[static_cast<std::size_t>(k + 2)];
        return GridFunction(grid_, std::move(v));
    }

    factor_dense();
    std::vector<double> rhs(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) rhs[static_cast<std::size_t>(k)] = f_nodes[static_cast<std::size_t>(k + 1)];
    lu_solve(dense_lu_, dense_piv_, m, rhs);
    for (int k = 0; k < m; ++k) v[static_cast<std::size_t>(k + 1)] = rhs[static_cast<std::size_t>(k)];
    return GridFunction(grid_, std::move(v));
}

void EllipticOperator::dump_system(std::ostream& os, const std::vector<double>* rhs) const {
    os << "i,x,sub,diag,super,q,qprime" << (rhs ? ",rhs" : "") << "\n";
    const int m = grid_.n - 2;
    for (int k = 0; k < m; ++k) {
        os << (k + 1) << ',' << format_double(grid_.node(k + 1)) << ','
           << format_double(sub_[static_cast<std::size_t>(k)]) << ','
           << format_double(diag_[static_cast<std::size_t>(k)]) << ','
           << format_double(super_[static_cast<std::size_t>(k)]) << ','
           << format_double(q_vals_[static_cast<std::size_t>(k)]) << ','
           << format_double(qprime_vals_[static_cast<std::size_t>(k)]);
        if (rhs) os << ',' << format_double((*rhs)[static_cast<std::size_t>(k + 1)]);
        os << '\n';
    }
}

EllipticOperator assemble(const ScoreModel& q, const Grid& grid, BoundaryCondition bc) {
    return EllipticOperator(q, grid, bc);
}

}  // namespace kamtrans
