#pragma once

#include <Eigen/Core>

#include <array>
#include <functional>
#include <memory>

#include "sstokes/mesh.hpp"

namespace sstokes {

/**
 * MINI pair on a Mesh: continuous P1 plus one cubic bubble per triangle for
 * each velocity component, continuous P1 for the pressure.
 *
 * Velocity numbering is component-blocked. Component c owns the contiguous
 * range [c*S, (c+1)*S) with S = #vertices + #triangles; inside a block the
 * vertex values come first, then the bubbles in triangle order. Pressure DOF
 * k is the value at vertex k.
 */
class MiniSpace {
public:
    static constexpr int kScalarBasisPerTriangle = 4;  // lambda_0..2, bubble
    static constexpr int kVelocityBasisPerTriangle = 2 * kScalarBasisPerTriangle;

    explicit MiniSpace(std::shared_ptr<const Mesh> mesh);

    [[nodiscard]] const Mesh& mesh() const { return *mesh_; }
    [[nodiscard]] const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }

    [[nodiscard]] int scalar_block_size() const { return block_; }
    [[nodiscard]] int num_velocity_dofs() const { return 2 * block_; }
    [[nodiscard]] int num_pressure_dofs() const { return static_cast<int>(mesh_->num_vertices()); }

    [[nodiscard]] int vertex_dof(int component, int vertex) const { return component * block_ + vertex; }
    [[nodiscard]] int bubble_dof(int component, int triangle) const
    {
        return component * block_ + static_cast<int>(mesh_->num_vertices()) + triangle;
    }

    /// Scalar (per-component) DOFs of triangle t: its three vertices then the bubble.
    [[nodiscard]] std::array<int, kScalarBasisPerTriangle> scalar_dofs(int t) const;

    /// Velocity DOFs of triangle t, ordered component-major: index c*4 + a.
    [[nodiscard]] std::array<int, kVelocityBasisPerTriangle> velocity_dofs(int t) const;

private:
    std::shared_ptr<const Mesh> mesh_;
    int block_;
};

/// Scalar MINI basis values {lambda_0, lambda_1, lambda_2, 27 lambda_0 lambda_1 lambda_2}.
[[nodiscard]] std::array<double, 4> scalar_basis(const std::array<double, 3>& bary);

/// Gradients of the barycentric coordinates of triangle t (constant on t).
[[nodiscard]] std::array<Vec2, 3> barycentric_gradients(const Mesh& mesh, int t);

/// Gradients of the scalar MINI basis at a point with the given barycentrics.
[[nodiscard]] std::array<Vec2, 4> scalar_basis_gradients(const std::array<Vec2, 3>& grad_lambda,
                                                         const std::array<double, 3>& bary);

enum class Role { Velocity, Pressure };

/// Coefficient vector tied to a space and a role.
struct FEFunction {
    std::shared_ptr<const MiniSpace> space;
    Role role = Role::Velocity;
    Eigen::VectorXd coeffs;

    FEFunction() = default;
    FEFunction(std::shared_ptr<const MiniSpace> s, Role r, Eigen::VectorXd c);

    [[nodiscard]] static FEFunction zero(std::shared_ptr<const MiniSpace> s, Role r);

    /// Velocity value at p (P1 + bubble); requires role Velocity.
    [[nodiscard]] Vec2 velocity_at(Vec2 p) const;
    [[nodiscard]] Vec2 velocity_at(const PointLocation& loc) const;

    /// Pressure value at p; requires role Pressure.
    [[nodiscard]] double pressure_at(Vec2 p) const;
    [[nodiscard]] double pressure_at(const PointLocation& loc) const;
};

using VectorField = std::function<Vec2(Vec2)>;
using ScalarField = std::function<double(Vec2)>;

/// Nodal P1 interpolant; bubble coefficients are zero.
[[nodiscard]] FEFunction interpolate_velocity(std::shared_ptr<const MiniSpace> space, const VectorField& field);
[[nodiscard]] FEFunction interpolate_pressure(std::shared_ptr<const MiniSpace> space, const ScalarField& field);

}  // namespace sstokes
