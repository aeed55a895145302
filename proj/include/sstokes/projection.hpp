#pragma once

#include <Eigen/Core>

#include <memory>

#include "sstokes/operators.hpp"
#include "sstokes/saddle_point.hpp"

namespace sstokes {

/**
 * L2-orthogonal projection onto the discretely divergence-free subspace
 *
 *     X_h = { v in V_h : (div v, q) = 0 for all q in Q_h }.
 *
 * Solves (w, a) - (q, div a) = (v, a), (div w, eta) = 0 with a factorization
 * that is reused across calls.
 */
class XhProjector {
public:
    explicit XhProjector(std::shared_ptr<const AssembledOperators> ops);

    [[nodiscard]] FEFunction project(const FEFunction& v) const;
    [[nodiscard]] FEFunction project(const VectorField& v) const;

    /// Projection from a precomputed load vector (v, phi_i).
    [[nodiscard]] FEFunction project_load(const Eigen::VectorXd& load) const;

private:
    std::shared_ptr<const AssembledOperators> ops_;
    SaddlePointSolver solver_;
};

[[nodiscard]] FEFunction project_Xh(std::shared_ptr<const AssembledOperators> ops, const FEFunction& v);
[[nodiscard]] FEFunction project_Xh(std::shared_ptr<const AssembledOperators> ops, const VectorField& v);

/// ||B u||_inf / (1 + ||u||_2), the scale-aware discrete divergence residual.
[[nodiscard]] double divergence_residual(const AssembledOperators& ops, const Eigen::VectorXd& u);

}  // namespace sstokes
