#include "sstokes/operators.hpp"

#include <cmath>
#include <vector>

#include "sstokes/quadrature.hpp"

namespace sstokes {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

SparseMatrix from_triplets(int rows, int cols, const Triplets& triplets)
{
    SparseMatrix m(rows, cols);
    m.setFromTriplets(triplets.begin(), triplets.end());
    m.makeCompressed();
    return m;
}

}  // namespace

AssembledOperators assemble_operators(std::shared_ptr<const MiniSpace> space)
{
    const Mesh& mesh = space->mesh();
    const auto& rule = quadrature_rule();
    const int nt = static_cast<int>(mesh.num_triangles());
    const int nu = space->num_velocity_dofs();
    const int np = space->num_pressure_dofs();
    const int block = space->scalar_block_size();

    Triplets mass, deform, grad, div, pmass, pstiff;
    mass.reserve(static_cast<std::size_t>(nt) * 32);
    deform.reserve(static_cast<std::size_t>(nt) * 64);
    grad.reserve(static_cast<std::size_t>(nt) * 32);
    div.reserve(static_cast<std::size_t>(nt) * 24);
    pmass.reserve(static_cast<std::size_t>(nt) * 9);
    pstiff.reserve(static_cast<std::size_t>(nt) * 9);

    for (int t = 0; t < nt; ++t) {
        const double area = mesh.signed_area(t);
        const auto gl = barycentric_gradients(mesh, t);
        const auto sdofs = space->scalar_dofs(t);
        const auto& tri = mesh.triangle(t);

        double me[4][4] = {};
        double ke[4][4] = {};        // grad N_a . grad N_b
        double cross[4][4][2][2] = {}; // d_d N_a * d_c N_b, indexed [a][b][c][d]
        double be[3][4][2] = {};     // psi_j * d_c N_a
        double pm[3][3] = {};

        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double w = rule.weights[q] * 2.0 * area;
            const auto& l = rule.points[q];
            const auto n = scalar_basis(l);
            const auto g = scalar_basis_gradients(gl, l);
            for (int a = 0; a < 4; ++a) {
                for (int b = 0; b < 4; ++b) {
                    me[a][b] += w * n[a] * n[b];
                    ke[a][b] += w * (g[a].x * g[b].x + g[a].y * g[b].y);
                    const double ga[2] = {g[a].x, g[a].y};
                    const double gb[2] = {g[b].x, g[b].y};
                    for (int c = 0; c < 2; ++c) {
                        for (int d = 0; d < 2; ++d) {
                            cross[a][b][c][d] += w * ga[d] * gb[c];
                        }
                    }
                }
                for (int j = 0; j < 3; ++j) {
                    be[j][a][0] += w * l[j] * g[a].x;
                    be[j][a][1] += w * l[j] * g[a].y;
                }
            }
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j) {
                    pm[i][j] += w * l[i] * l[j];
                }
            }
        }

        for (int c = 0; c < 2; ++c) {
            for (int a = 0; a < 4; ++a) {
                const int row = c * block + sdofs[a];
                for (int d = 0; d < 2; ++d) {
                    for (int b = 0; b < 4; ++b) {
                        const int col = d * block + sdofs[b];
                        // 2 D(N_a e_c) : D(N_b e_d) = delta_cd grad N_a . grad N_b + d_d N_a d_c N_b
                        double k = cross[a][b][c][d];
                        if (c == d) {
                            k += ke[a][b];
                        }
                        deform.emplace_back(row, col, k);
                    }
                }
                for (int b = 0; b < 4; ++b) {
                    const int col = c * block + sdofs[b];
                    mass.emplace_back(row, col, me[a][b]);
                    grad.emplace_back(row, col, ke[a][b]);
                }
                for (int j = 0; j < 3; ++j) {
                    div.emplace_back(tri[j], row, be[j][a][c]);
                }
            }
        }
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                pmass.emplace_back(tri[i], tri[j], pm[i][j]);
                pstiff.emplace_back(tri[i], tri[j], ke[i][j]);
            }
        }
    }

    AssembledOperators ops;
    ops.space = std::move(space);
    ops.mass = from_triplets(nu, nu, mass);
    ops.deformation = from_triplets(nu, nu, deform);
    ops.gradient = from_triplets(nu, nu, grad);
    ops.divergence = from_triplets(np, nu, div);
    ops.pressure_mass = from_triplets(np, np, pmass);
    ops.pressure_stiffness = from_triplets(np, np, pstiff);
    return ops;
}

double norm(const FEFunction& f, const AssembledOperators& ops, NormKind kind)
{
    const bool velocity = f.role == Role::Velocity;
    const SparseMatrix& m = velocity ? ops.mass : ops.pressure_mass;
    const SparseMatrix& k = velocity ? ops.gradient : ops.pressure_stiffness;
    double sq = 0.0;
    if (kind != NormKind::H1Seminorm) {
        sq += f.coeffs.dot(m * f.coeffs);
    }
    if (kind != NormKind::L2) {
        sq += f.coeffs.dot(k * f.coeffs);
    }
    return std::sqrt(std::max(sq, 0.0));
}

Eigen::VectorXd velocity_load(const MiniSpace& space, const VectorField& field)
{
    const Mesh& mesh = space.mesh();
    const auto& rule = quadrature_rule();
    Eigen::VectorXd load = Eigen::VectorXd::Zero(space.num_velocity_dofs());
    for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
        const double area = mesh.signed_area(t);
        const auto dofs = space.velocity_dofs(t);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double w = rule.weights[q] * 2.0 * area;
            const auto n = scalar_basis(rule.points[q]);
            const Vec2 value = field(mesh.to_cartesian(t, rule.points[q]));
            for (std::size_t a = 0; a < 4; ++a) {
                load[dofs[a]] += w * value.x * n[a];
                load[dofs[4 + a]] += w * value.y * n[a];
            }
        }
    }
    return load;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> constant_field_loads(const MiniSpace& space)
{
    return {velocity_load(space, [](Vec2) { return Vec2{1.0, 0.0}; }),
            velocity_load(space, [](Vec2) { return Vec2{0.0, 1.0}; })};
}

}  // namespace sstokes
