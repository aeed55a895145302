#include "sstokes/saddle_point.hpp"

#include <string>
#include <vector>

namespace sstokes {

SaddlePointSolver::SaddlePointSolver(const Eigen::SparseMatrix<double>& a, const Eigen::SparseMatrix<double>& b)
    : nu_(static_cast<int>(a.rows())), np_(static_cast<int>(b.rows()))
{
    if (a.cols() != nu_ || b.cols() != nu_) {
        throw std::invalid_argument("saddle point: block dimensions do not match");
    }
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(a.nonZeros() + 2 * b.nonZeros()));
    for (int k = 0; k < a.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it) {
            triplets.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
        }
    }
    for (int k = 0; k < b.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(b, k); it; ++it) {
            const int p = nu_ + static_cast<int>(it.row());
            const int v = static_cast<int>(it.col());
            triplets.emplace_back(p, v, it.value());
            triplets.emplace_back(v, p, -it.value());
        }
    }
    matrix_.resize(nu_ + np_, nu_ + np_);
    matrix_.setFromTriplets(triplets.begin(), triplets.end());
    matrix_.makeCompressed();

    lu_.analyzePattern(matrix_);
    lu_.factorize(matrix_);
    if (lu_.info() != Eigen::Success) {
        throw NumericalError("saddle point: sparse LU factorization failed (" + lu_.lastErrorMessage() + ")");
    }
}

void SaddlePointSolver::solve(const Eigen::VectorXd& f, const Eigen::VectorXd& g, Eigen::VectorXd& u,
                              Eigen::VectorXd& q) const
{
    Eigen::VectorXd rhs(nu_ + np_);
    rhs.head(nu_) = f;
    rhs.tail(np_) = g;
    const Eigen::VectorXd x = lu_.solve(rhs);
    if (!x.allFinite()) {
        throw NumericalError("saddle point: solve produced non-finite values");
    }
    u = x.head(nu_);
    q = x.tail(np_);
}

}  // namespace sstokes
