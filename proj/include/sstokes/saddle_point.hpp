#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <stdexcept>

namespace sstokes {

/// Raised when a factorization fails or a solve produces non-finite output.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * Factorized block system
 *
 *     [ A   -B^T ] [u]   [f]
 *     [ B    0   ] [q] = [g]
 *
 * with A symmetric positive definite (velocity block) and B the discrete
 * divergence. Factorized once with a sparse LU; solve() is const and may be
 * called concurrently.
 */
class SaddlePointSolver {
public:
    SaddlePointSolver(const Eigen::SparseMatrix<double>& velocity_block,
                      const Eigen::SparseMatrix<double>& divergence);

    SaddlePointSolver(const SaddlePointSolver&) = delete;
    SaddlePointSolver& operator=(const SaddlePointSolver&) = delete;

    [[nodiscard]] int num_velocity() const { return nu_; }
    [[nodiscard]] int num_pressure() const { return np_; }

    /// The assembled block matrix.
    [[nodiscard]] const Eigen::SparseMatrix<double>& matrix() const { return matrix_; }

    void solve(const Eigen::VectorXd& f, const Eigen::VectorXd& g, Eigen::VectorXd& u, Eigen::VectorXd& q) const;

private:
    int nu_;
    int np_;
    Eigen::SparseMatrix<double> matrix_;
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
};

}  // namespace sstokes
