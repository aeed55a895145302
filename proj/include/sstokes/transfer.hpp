#pragma once

#include <Eigen/Core>

#include <memory>

#include "sstokes/operators.hpp"

namespace sstokes {

/**
 * Exact evaluation of MINI functions from a coarse space at the quadrature
 * points of a nested fine mesh. Points are ordered triangle-major
 * (index = t * 12 + q on the fine mesh).
 *
 * The evaluation maps are sparse matrices built once, so repeated transfers
 * (one per Monte Carlo sample) cost a sparse product.
 */
class QuadratureTransfer {
public:
    QuadratureTransfer(std::shared_ptr<const MiniSpace> coarse, std::shared_ptr<const Mesh> fine);

    [[nodiscard]] Eigen::Index num_points() const { return weights_.size(); }

    /// Physical quadrature weights (sum to the domain area).
    [[nodiscard]] const Eigen::VectorXd& weights() const { return weights_; }

    /// Point values: a (points x 2) matrix for velocities, (points x 1) for pressures.
    [[nodiscard]] Eigen::MatrixXd evaluate(const FEFunction& f) const;

    [[nodiscard]] const MiniSpace& coarse_space() const { return *coarse_; }
    [[nodiscard]] const Mesh& fine_mesh() const { return *fine_; }

private:
    std::shared_ptr<const MiniSpace> coarse_;
    std::shared_ptr<const Mesh> fine_;
    SparseMatrix scalar_map_;  // points x (P1 + bubble) scalar block
    SparseMatrix p1_map_;      // points x vertices
    Eigen::VectorXd weights_;
};

/// One-shot form of QuadratureTransfer::evaluate.
[[nodiscard]] Eigen::MatrixXd evaluate_on_fine_quadrature(const FEFunction& f, std::shared_ptr<const Mesh> fine_mesh);

/// sum_k w_k |a_k - b_k|^2 over quadrature points.
[[nodiscard]] double weighted_l2_distance_sq(const Eigen::VectorXd& weights, const Eigen::MatrixXd& a,
                                             const Eigen::MatrixXd& b);

/// sum_k w_k |a_k|^2 over quadrature points.
[[nodiscard]] double weighted_l2_norm_sq(const Eigen::VectorXd& weights, const Eigen::MatrixXd& a);

}  // namespace sstokes
