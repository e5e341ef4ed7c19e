#pragma once

#include <vector>

#include "kamtrans/grid.hpp"
#include "kamtrans/score.hpp"

namespace kamtrans {

/// How the second-order operator L(q)v = v'' + q v' + q' v is closed at the
/// interval ends.
///  - dirichlet_zero: v(a) = v(b) = 0, interior unknowns only (tridiagonal).
///    The right choice when source and target share the support [a, b].
///  - free: the ODE is collocated at the boundary nodes too, with one-sided
///    second-order stencils. No boundary values are imposed; for problems
///    whose natural domain is the whole line (e.g. Gaussian targets) this
///    selects the bounded solution instead of forcing endpoint layers.
enum class BoundaryCondition { dirichlet_zero, free_collocation };

/// Assembled discretization of L(q) on a grid. Immutable; reusable across
/// solves (the operator is the same at every KAM step).
class EllipticOperator {
public:
    EllipticOperator(const ScoreModel& q, const Grid& grid,
                     BoundaryCondition bc = BoundaryCondition::dirichlet_zero);

    const Grid& grid() const { return grid_; }
    BoundaryCondition bc() const { return bc_; }

    /// Solve L(q) v = f. In Dirichlet mode f is read at interior nodes and
    /// the result has v(a) = v(b) = 0; in free mode f is read at all nodes.
    /// Tridiagonal elimination with a dense partial-pivot fallback; throws
    /// SingularOperatorError when both fail.
    GridFunction solve(const GridFunction& f) const;
    GridFunction solve(const std::vector<double>& f_nodes) const;

    /// Bands of the interior rows (sub, diag, super), for diagnostics.
    const std::vector<double>& sub() const { return sub_; }
    const std::vector<double>& diag() const { return diag_; }
    const std::vector<double>& super() const { return super_; }

    /// Dump the assembled rows (and optionally a right-hand side) as CSV.
    void dump_system(std::ostream& os, const std::vector<double>* rhs = nullptr) const;

private:
    Grid grid_;
    BoundaryCondition bc_;
    std::vector<double> q_vals_, qprime_vals_;   // interior nodes
    std::vector<double> sub_, diag_, super_;     // interior rows
    // free mode: dense row-major n x n matrix, LU-factored on first use
    mutable std::vector<double> dense_lu_;
    mutable std::vector<int> dense_piv_;
    mutable bool dense_ready_ = false;
    std::vector<double> dense_matrix_;

    void factor_dense() const;
};

EllipticOperator assemble(const ScoreModel& q, const Grid& grid,
                          BoundaryCondition bc = BoundaryCondition::dirichlet_zero);

/// In-place LU with partial pivoting on a row-major n x n matrix.
/// Returns the condition indicator max|pivot| / min|pivot|; throws
/// SingularOperatorError if a pivot vanishes.
double lu_factor(std::vector<double>& a, std::vector<int>& piv, int n);
void lu_solve(const std::vector<double>& lu, const std::vector<int>& piv, int n,
              std::vector<double>& rhs);

}  // namespace kamtrans
