#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <gtest/gtest.h>

#include "sstokes/projection.hpp"
#include "sstokes/quadrature.hpp"
#include "sstokes/transfer.hpp"
#include "test_support.hpp"

using namespace sstokes;
using sstokes::testing::make_fixture;
using sstokes::testing::random_vector;

namespace {

double inf_norm(const Eigen::VectorXd& v) { return v.cwiseAbs().maxCoeff(); }

double sparse_inf_norm(const SparseMatrix& a)
{
    Eigen::VectorXd rows = Eigen::VectorXd::Zero(a.rows());
    for (int k = 0; k < a.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
            rows[it.row()] += std::abs(it.value());
        }
    }
    return rows.maxCoeff();
}

}  // namespace

TEST(MiniSpace, DofCounts)
{
    const auto f = make_fixture(2);
    EXPECT_EQ(f.space->num_velocity_dofs(), 2 * (9 + 8));
    EXPECT_EQ(f.space->num_pressure_dofs(), 9);
    EXPECT_EQ(f.ops->mass.rows(), 34);
    EXPECT_EQ(f.ops->divergence.rows(), 9);
    EXPECT_EQ(f.ops->divergence.cols(), 34);
}

TEST(MiniSpace, BubbleIsOneAtCentroid)
{
    const auto phi = scalar_basis({1.0 / 3, 1.0 / 3, 1.0 / 3});
    EXPECT_NEAR(phi[3], 1.0, 1e-15);
    EXPECT_DOUBLE_EQ(scalar_basis({1.0, 0.0, 0.0})[3], 0.0);
}

TEST(Operators, P1MassBlockMatchesElementFormula)
{
    // Element oracle from the factorial formula: int lambda_i^2 = |T|/6, int lambda_i lambda_j = |T|/12.
    const auto f = make_fixture(1);
    const Mesh& mesh = *f.mesh;
    Eigen::MatrixXd oracle = Eigen::MatrixXd::Zero(4, 4);
    for (int t = 0; t < 2; ++t) {
        const double area = mesh.signed_area(t);
        const Triangle& tri = mesh.triangle(t);
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                oracle(tri[static_cast<std::size_t>(a)], tri[static_cast<std::size_t>(b)]) +=
                    area / 12.0 * (a == b ? 2.0 : 1.0);
            }
        }
    }
    const Eigen::MatrixXd mass(f.ops->mass);
    const Eigen::MatrixXd pmass(f.ops->pressure_mass);
    EXPECT_LT((mass.topLeftCorner(4, 4) - oracle).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((mass.block(f.space->vertex_dof(1, 0), f.space->vertex_dof(1, 0), 4, 4) - oracle).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((pmass - oracle).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Operators, SymmetryAndDefiniteness)
{
    const auto f = make_fixture(4);
    const SparseMatrix mt = f.ops->mass.transpose();
    const SparseMatrix kt = f.ops->deformation.transpose();
    EXPECT_LT((f.ops->mass - mt).norm(), 1e-15 * f.ops->mass.norm());
    EXPECT_LT((f.ops->deformation - kt).norm(), 1e-13 * f.ops->deformation.norm());
    Eigen::SimplicialLLT<SparseMatrix> llt(f.ops->mass);
    EXPECT_EQ(llt.info(), Eigen::Success);

    std::mt19937_64 rng(3);
    for (int k = 0; k < 20; ++k) {
        const Eigen::VectorXd c = random_vector(f.ops->mass.rows(), rng);
        EXPECT_GE(c.dot(f.ops->deformation * c), -1e-13);
    }
}

TEST(Operators, DeformationAnnihilatesRigidMotions)
{
    for (int n : {2, 8}) {
        const auto f = make_fixture(n);
        const double scale = sparse_inf_norm(f.ops->deformation);
        for (const VectorField& field : {VectorField([](Vec2) { return Vec2{1.0, 0.0}; }),
                                         VectorField([](Vec2) { return Vec2{0.0, 1.0}; }),
                                         VectorField([](Vec2 p) { return Vec2{-p.y, p.x}; })}) {
            const FEFunction c = interpolate_velocity(f.space, field);
            EXPECT_LE(inf_norm(f.ops->deformation * c.coeffs), 1e-12 * scale * inf_norm(c.coeffs)) << "n=" << n;
        }
    }
}

TEST(Operators, DeformationEnergyOfLinearFields)
{
    // For u = (a x + b y, c x + d y): 2 |D(u)|^2 = 2 (a^2 + d^2) + (b + c)^2 on the unit square.
    const auto f = make_fixture(4);
    const double a = 0.3, b = -1.2, c = 0.7, d = 2.0;
    const FEFunction u = interpolate_velocity(f.space, [&](Vec2 p) { return Vec2{a * p.x + b * p.y, c * p.x + d * p.y}; });
    const double expected = 2.0 * (a * a + d * d) + (b + c) * (b + c);
    EXPECT_NEAR(u.coeffs.dot(f.ops->deformation * u.coeffs), expected, 1e-12);
    EXPECT_NEAR(u.coeffs.dot(f.ops->gradient * u.coeffs), a * a + b * b + c * c + d * d, 1e-12);
}

TEST(Operators, DivergenceOfLinearFieldIsPressureMassRowSum)
{
    // div(x, y) = 2, so (div u, psi_j) = 2 int psi_j.
    const auto f = make_fixture(4);
    const FEFunction u = interpolate_velocity(f.space, [](Vec2 p) { return p; });
    const Eigen::VectorXd expected = 2.0 * (f.ops->pressure_mass * Eigen::VectorXd::Ones(f.space->num_pressure_dofs()));
    EXPECT_LT(inf_norm(f.ops->divergence * u.coeffs - expected), 1e-14);
}

TEST(Operators, AssemblyIsBitwiseReproducible)
{
    const auto f = make_fixture(8);
    const AssembledOperators again = assemble_operators(f.space);
    for (auto [a, b] : {std::pair{&f.ops->mass, &again.mass}, std::pair{&f.ops->deformation, &again.deformation},
                        std::pair{&f.ops->divergence, &again.divergence}}) {
        ASSERT_EQ(a->nonZeros(), b->nonZeros());
        EXPECT_EQ(Eigen::MatrixXd(*a), Eigen::MatrixXd(*b));
    }
}

TEST(Operators, DiscreteKornConstantIsStable)
{
    std::vector<double> theta;
    for (int n : {4, 8, 16}) {
        const auto f = make_fixture(n);
        const SparseMatrix lhs = f.ops->mass + f.ops->deformation;
        const SparseMatrix rhs = f.ops->mass + f.ops->gradient;
        std::mt19937_64 rng(100 + n);
        double t = 1e300;
        for (int k = 0; k < 50; ++k) {
            const Eigen::VectorXd c = random_vector(lhs.rows(), rng);
            t = std::min(t, c.dot(lhs * c) / c.dot(rhs * c));
        }
        theta.push_back(t);
        EXPECT_GT(t, 0.0) << "n=" << n;
    }
    EXPECT_GE(theta.back(), 0.5 * theta.front());
}

TEST(Operators, DivergenceHasFullRowRank)
{
    for (int n : {2, 4}) {
        const auto f = make_fixture(n);
        const Eigen::MatrixXd m(f.ops->mass);
        const Eigen::MatrixXd b(f.ops->divergence);
        const Eigen::MatrixXd schur = b * m.llt().solve(b.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(schur);
        EXPECT_GT(eig.eigenvalues().minCoeff(), 1e-8 * eig.eigenvalues().maxCoeff()) << "n=" << n;
        const Eigen::VectorXd ones = Eigen::VectorXd::Ones(f.space->num_pressure_dofs());
        EXPECT_GT((f.ops->divergence.transpose() * ones).norm(), 1e-3);
    }
}

TEST(Norms, Examples)
{
    const auto f = make_fixture(4);
    EXPECT_EQ(norm(FEFunction::zero(f.space, Role::Velocity), *f.ops, NormKind::H1), 0.0);
    const FEFunction ones = interpolate_velocity(f.space, [](Vec2) { return Vec2{1.0, 1.0}; });
    EXPECT_NEAR(norm(ones, *f.ops, NormKind::L2), std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(norm(ones, *f.ops, NormKind::H1Seminorm), 0.0, 1e-7);
    const FEFunction lin = interpolate_velocity(f.space, [](Vec2 p) { return Vec2{p.x, 0.0}; });
    EXPECT_NEAR(norm(lin, *f.ops, NormKind::H1Seminorm), 1.0, 1e-14);
    EXPECT_NEAR(norm(lin, *f.ops, NormKind::L2), std::sqrt(1.0 / 3.0), 1e-14);
    const FEFunction p = interpolate_pressure(f.space, [](Vec2 x) { return x.y; });
    EXPECT_NEAR(norm(p, *f.ops, NormKind::H1), std::sqrt(1.0 / 3.0 + 1.0), 1e-14);
}

TEST(Projection, ZeroAndIdempotence)
{
    const auto f = make_fixture(8);
    const XhProjector proj(f.ops);
    const FEFunction zero = proj.project(FEFunction::zero(f.space, Role::Velocity));
    EXPECT_EQ(zero.coeffs.cwiseAbs().maxCoeff(), 0.0);

    std::mt19937_64 rng(11);
    const FEFunction v(f.space, Role::Velocity, random_vector(f.space->num_velocity_dofs(), rng));
    const FEFunction w = proj.project(v);
    EXPECT_LE(inf_norm(f.ops->divergence * w.coeffs), 1e-10 * (1.0 + norm(w, *f.ops, NormKind::L2)));
    const FEFunction ww = proj.project(w);
    EXPECT_LT(inf_norm(ww.coeffs - w.coeffs), 1e-10);
}

TEST(Projection, ResidualIsMassOrthogonalToDivergenceFreeSpace)
{
    const auto f = make_fixture(8);
    const XhProjector proj(f.ops);
    std::mt19937_64 rng(12);
    const FEFunction v(f.space, Role::Velocity, random_vector(f.space->num_velocity_dofs(), rng));
    const FEFunction z(f.space, Role::Velocity, random_vector(f.space->num_velocity_dofs(), rng));
    const Eigen::VectorXd w = proj.project(v).coeffs;
    const Eigen::VectorXd zx = proj.project(z).coeffs;
    const Eigen::VectorXd r = v.coeffs - w;
    EXPECT_LT(std::abs(r.dot(f.ops->mass * zx)), 1e-12 * v.coeffs.norm() * zx.norm());
}

TEST(Projection, H1RatioDoesNotGrowUnderRefinement)
{
    std::vector<double> maxima;
    for (int n : {4, 8, 16, 32}) {
        const auto f = make_fixture(n);
        const XhProjector proj(f.ops);
        std::mt19937_64 rng(1000 + n);
        double worst = 0.0;
        for (int k = 0; k < 20; ++k) {
            const FEFunction v(f.space, Role::Velocity, random_vector(f.space->num_velocity_dofs(), rng));
            const FEFunction w = proj.project(v);
            worst = std::max(worst, norm(w, *f.ops, NormKind::H1) / norm(v, *f.ops, NormKind::H1));
        }
        maxima.push_back(worst);
    }
    for (std::size_t i = 1; i < maxima.size(); ++i) {
        EXPECT_LE(maxima[i], 1.25 * maxima[i - 1]) << "level " << i;
    }
}

TEST(Transfer, ConstantFieldIsConstantEverywhere)
{
    const auto coarse = make_fixture(2);
    const auto fine = std::make_shared<const Mesh>(build_uniform_mesh(8));
    const FEFunction c = interpolate_velocity(coarse.space, [](Vec2) { return Vec2{0.25, -3.0}; });
    const Eigen::MatrixXd values = evaluate_on_fine_quadrature(c, fine);
    ASSERT_EQ(values.rows(), static_cast<Eigen::Index>(fine->num_triangles()) * kQuadraturePoints);
    EXPECT_LT((values.col(0).array() - 0.25).abs().maxCoeff(), 1e-15);
    EXPECT_LT((values.col(1).array() + 3.0).abs().maxCoeff(), 1e-15);
}

TEST(Transfer, OwnMeshMatchesDirectEvaluation)
{
    const auto f = make_fixture(4);
    std::mt19937_64 rng(5);
    const FEFunction u(f.space, Role::Velocity, random_vector(f.space->num_velocity_dofs(), rng));
    const FEFunction p(f.space, Role::Pressure, random_vector(f.space->num_pressure_dofs(), rng));
    const QuadratureTransfer transfer(f.space, f.mesh);
    const Eigen::MatrixXd uv = transfer.evaluate(u);
    const Eigen::MatrixXd pv = transfer.evaluate(p);
    const auto& rule = quadrature_rule();
    for (int t = 0; t < static_cast<int>(f.mesh->num_triangles()); ++t) {
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Eigen::Index k = t * static_cast<Eigen::Index>(rule.size()) + static_cast<Eigen::Index>(q);
            const Vec2 x = f.mesh->to_cartesian(t, rule.points[q]);
            const Vec2 direct = u.velocity_at(x);
            EXPECT_NEAR(uv(k, 0), direct.x, 1e-14);
            EXPECT_NEAR(uv(k, 1), direct.y, 1e-14);
            EXPECT_NEAR(pv(k, 0), p.pressure_at(x), 1e-14);
        }
    }
}

TEST(Transfer, FineQuadratureNormEqualsCoarseMassNorm)
{
    const auto coarse = make_fixture(4);
    const auto fine = std::make_shared<const Mesh>(build_uniform_mesh(16));
    std::mt19937_64 rng(6);
    const FEFunction u(coarse.space, Role::Velocity, random_vector(coarse.space->num_velocity_dofs(), rng));
    const FEFunction p(coarse.space, Role::Pressure, random_vector(coarse.space->num_pressure_dofs(), rng));
    const QuadratureTransfer transfer(coarse.space, fine);
    const double u_fine = std::sqrt(weighted_l2_norm_sq(transfer.weights(), transfer.evaluate(u)));
    const double p_fine = std::sqrt(weighted_l2_norm_sq(transfer.weights(), transfer.evaluate(p)));
    EXPECT_NEAR(u_fine / norm(u, *coarse.ops, NormKind::L2), 1.0, 1e-12);
    EXPECT_NEAR(p_fine / norm(p, *coarse.ops, NormKind::L2), 1.0, 1e-12);
}

TEST(Transfer, NonNestedMeshesRejected)
{
    const auto coarse = make_fixture(3);
    const auto fine = std::make_shared<const Mesh>(build_uniform_mesh(8));
    EXPECT_THROW((void)evaluate_on_fine_quadrature(FEFunction::zero(coarse.space, Role::Velocity), fine), UsageError);
}
