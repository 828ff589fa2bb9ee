#pragma once

#include "aclab/grid.hpp"

#include <Eigen/Sparse>

#include <string>
#include <vector>

namespace aclab {

/// Finite-volume discretization of eps^2 Delta_red + q on the quadrant grid,
/// Delta_red = d1^2 + d2^2 + n1/s1 d1 + n2/s2 d2. Axis nodes have no flux
/// through s = 0 (the symmetric condition) and outer nodes carry Dirichlet
/// data, so the unknowns are the nodes with i, j < N.
///
/// `matrix` is K = -V (eps^2 Delta_red + diag q) on the unknowns, with V the
/// cell volumes. K is symmetric; it is a Z-matrix whenever q is bounded.
struct AssembledOperator {
    Grid2D grid;
    double eps = 0.0;
    /// Diagonal potential per node: 1 - 3u^2 for a Jacobian, 0 otherwise.
    std::vector<double> potential;
    Eigen::SparseMatrix<double> matrix;
    Eigen::VectorXd volume;
    /// node -> unknown index, -1 on the outer boundary.
    std::vector<long> unknown;
    std::vector<std::size_t> node;

    /// (eps^2 Delta_red + q) v at interior nodes using v's boundary values; 0 on the boundary.
    ScalarField2D apply(const ScalarField2D& v) const;
    /// Restriction to the unknowns and prolongation (boundary entries taken from `base`).
    Eigen::VectorXd restrict(const ScalarField2D& v) const;
    ScalarField2D prolong(const Eigen::VectorXd& x, const ScalarField2D& base) const;
};

/// Throws InvalidArgument when h > eps / 8. With u the potential is 1 - 3u^2.
AssembledOperator assemble_operator(const Grid2D& grid, double eps, const ScalarField2D* u = nullptr);

struct PdeResidual {
    ScalarField2D field;
    double sup_norm = 0.0;
    /// Same residual weighted by the cell volumes: sqrt(sum V r^2 / sum V).
    double weighted_l2 = 0.0;
};

/// eps^2 Delta_red u + u - u^3 at interior nodes.
PdeResidual pde_residual(const Grid2D& grid, double eps, const ScalarField2D& u);

struct NewtonOptions {
    double tol = 1e-10;
    int maxit = 20;
    /// Smallest accepted step length in the backtracking line search.
    double min_step = 1.0 / 64.0;
};

struct NewtonReport {
    int iterations = 0;
    /// Sup-norm residual before the first step and after each step.
    std::vector<double> residuals;
    std::vector<double> step_lengths;
    double final_sup_residual = 0.0;
    std::size_t unknowns = 0;
    std::size_t factor_nonzeros = 0;
    std::string linear_solver = "eigen-simplicial-ldlt";
    bool converged = false;
    /// max |u| of the final iterate.
    double max_abs = 0.0;
};

/// Damped Newton on eps^2 Delta_red u + u - u^3 = 0 with the outer boundary
/// values of `init` held fixed. Throws ConvergenceError when maxit is reached
/// without convergence; the error message carries the last residual.
ScalarField2D newton_solve(const Grid2D& grid, double eps, const ScalarField2D& init,
                           const NewtonOptions& opts, NewtonReport& report);

/// Sparse symmetric factorization shared by the Newton and stability solvers.
class SymmetricSolver {
public:
    void compute(const Eigen::SparseMatrix<double>& K);
    Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
    std::size_t factor_nonzeros() const;
    /// Number of negative pivots in the LDL^T factorization.
    std::size_t negative_pivots() const;

private:
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
    bool analyzed_ = false;
};

}  // namespace aclab
