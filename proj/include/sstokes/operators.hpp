#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <memory>

#include "sstokes/mini_space.hpp"

namespace sstokes {

using SparseMatrix = Eigen::SparseMatrix<double>;

/**
 * Global matrices of the MINI discretization, assembled with the degree-6 rule.
 *
 *   mass         (phi_i, phi_j)                      velocity x velocity
 *   deformation  2 (D(phi_i), D(phi_j)),  D = sym grad
 *   gradient     (grad phi_i, grad phi_j)            full-gradient stiffness
 *   divergence   (div phi_i, psi_j)                  pressure rows x velocity cols
 *   pressure_mass, pressure_stiffness                P1 x P1
 *
 * No boundary rows are eliminated: the stress condition is natural.
 */
struct AssembledOperators {
    std::shared_ptr<const MiniSpace> space;
    SparseMatrix mass;
    SparseMatrix deformation;
    SparseMatrix gradient;
    SparseMatrix divergence;
    SparseMatrix pressure_mass;
    SparseMatrix pressure_stiffness;
};

[[nodiscard]] AssembledOperators assemble_operators(std::shared_ptr<const MiniSpace> space);

enum class NormKind { L2, H1Seminorm, H1 };

/// L2 via the mass matrix, H1 seminorm via the full-gradient stiffness.
[[nodiscard]] double norm(const FEFunction& f, const AssembledOperators& ops, NormKind kind);

/// Load vector (field, phi_i) over all velocity basis functions.
[[nodiscard]] Eigen::VectorXd velocity_load(const MiniSpace& space, const VectorField& field);

/// Load vectors for the unit fields (1,0) and (0,1); a spatially constant
/// source f has load f.x * first + f.y * second.
[[nodiscard]] std::pair<Eigen::VectorXd, Eigen::VectorXd> constant_field_loads(const MiniSpace& space);

}  // namespace sstokes
