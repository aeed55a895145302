#include "sstokes/mini_space.hpp"

#include <string>
#include <utility>

namespace sstokes {

MiniSpace::MiniSpace(std::shared_ptr<const Mesh> mesh)
    : mesh_(std::move(mesh)),
      block_(static_cast<int>(mesh_->num_vertices() + mesh_->num_triangles()))
{
}

std::array<int, 4> MiniSpace::scalar_dofs(int t) const
{
    const auto& tri = mesh_->triangle(t);
    return {tri[0], tri[1], tri[2], static_cast<int>(mesh_->num_vertices()) + t};
}

std::array<int, 8> MiniSpace::velocity_dofs(int t) const
{
    const auto s = scalar_dofs(t);
    std::array<int, 8> dofs{};
    for (int c = 0; c < 2; ++c) {
        for (int a = 0; a < 4; ++a) {
            dofs[static_cast<std::size_t>(c * 4 + a)] = c * block_ + s[static_cast<std::size_t>(a)];
        }
    }
    return dofs;
}

std::array<double, 4> scalar_basis(const std::array<double, 3>& bary)
{
    return {bary[0], bary[1], bary[2], 27.0 * bary[0] * bary[1] * bary[2]};
}

std::array<Vec2, 3> barycentric_gradients(const Mesh& mesh, int t)
{
    const auto& tri = mesh.triangle(t);
    const Vec2& p0 = mesh.vertex(tri[0]);
    const Vec2& p1 = mesh.vertex(tri[1]);
    const Vec2& p2 = mesh.vertex(tri[2]);
    const double det = (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
    return {Vec2{(p1.y - p2.y) / det, (p2.x - p1.x) / det},
            Vec2{(p2.y - p0.y) / det, (p0.x - p2.x) / det},
            Vec2{(p0.y - p1.y) / det, (p1.x - p0.x) / det}};
}

std::array<Vec2, 4> scalar_basis_gradients(const std::array<Vec2, 3>& g, const std::array<double, 3>& l)
{
    const double c0 = 27.0 * l[1] * l[2];
    const double c1 = 27.0 * l[0] * l[2];
    const double c2 = 27.0 * l[0] * l[1];
    return {g[0], g[1], g[2],
            Vec2{c0 * g[0].x + c1 * g[1].x + c2 * g[2].x, c0 * g[0].y + c1 * g[1].y + c2 * g[2].y}};
}

FEFunction::FEFunction(std::shared_ptr<const MiniSpace> s, Role r, Eigen::VectorXd c)
    : space(std::move(s)), role(r), coeffs(std::move(c))
{
    const int expected = role == Role::Velocity ? space->num_velocity_dofs() : space->num_pressure_dofs();
    if (coeffs.size() != expected) {
        throw UsageError("FEFunction: coefficient length " + std::to_string(coeffs.size()) +
                         " does not match DOF count " + std::to_string(expected));
    }
}

FEFunction FEFunction::zero(std::shared_ptr<const MiniSpace> s, Role r)
{
    const int n = r == Role::Velocity ? s->num_velocity_dofs() : s->num_pressure_dofs();
    return FEFunction(std::move(s), r, Eigen::VectorXd::Zero(n));
}

Vec2 FEFunction::velocity_at(Vec2 p) const { return velocity_at(space->mesh().locate(p)); }

Vec2 FEFunction::velocity_at(const PointLocation& loc) const
{
    if (role != Role::Velocity) {
        throw UsageError("velocity_at called on a pressure function");
    }
    const auto phi = scalar_basis(loc.bary);
    const auto dofs = space->scalar_dofs(loc.triangle);
    const int block = space->scalar_block_size();
    Vec2 v;
    for (std::size_t a = 0; a < 4; ++a) {
        v.x += phi[a] * coeffs[dofs[a]];
        v.y += phi[a] * coeffs[block + dofs[a]];
    }
    return v;
}

double FEFunction::pressure_at(Vec2 p) const { return pressure_at(space->mesh().locate(p)); }

double FEFunction::pressure_at(const PointLocation& loc) const
{
    if (role != Role::Pressure) {
        throw UsageError("pressure_at called on a velocity function");
    }
    const auto& tri = space->mesh().triangle(loc.triangle);
    double v = 0.0;
    for (std::size_t a = 0; a < 3; ++a) {
        v += loc.bary[a] * coeffs[tri[a]];
    }
    return v;
}

FEFunction interpolate_velocity(std::shared_ptr<const MiniSpace> space, const VectorField& field)
{
    auto f = FEFunction::zero(space, Role::Velocity);
    const auto& verts = space->mesh().vertices();
    for (std::size_t v = 0; v < verts.size(); ++v) {
        const Vec2 value = field(verts[v]);
        f.coeffs[space->vertex_dof(0, static_cast<int>(v))] = value.x;
        f.coeffs[space->vertex_dof(1, static_cast<int>(v))] = value.y;
    }
    return f;
}

FEFunction interpolate_pressure(std::shared_ptr<const MiniSpace> space, const ScalarField& field)
{
    auto f = FEFunction::zero(space, Role::Pressure);
    const auto& verts = space->mesh().vertices();
    for (std::size_t v = 0; v < verts.size(); ++v) {
        f.coeffs[static_cast<Eigen::Index>(v)] = field(verts[v]);
    }
    return f;
}

}  // namespace sstokes
