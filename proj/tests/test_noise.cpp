#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "sstokes/noise.hpp"
#include "sstokes/philox.hpp"
#include "sstokes/quadrature.hpp"
#include "test_support.hpp"

using namespace sstokes;
using sstokes::testing::make_fixture;
using sstokes::testing::random_vector;

namespace {

std::shared_ptr<const Mesh> mesh_ptr(int n) { return std::make_shared<const Mesh>(build_uniform_mesh(n)); }

struct Moments {
    double mean = 0.0;
    double var = 0.0;
};

Moments moments(const std::vector<double>& x)
{
    Moments m;
    for (double v : x) {
        m.mean += v;
    }
    m.mean /= static_cast<double>(x.size());
    for (double v : x) {
        m.var += (v - m.mean) * (v - m.mean);
    }
    m.var /= static_cast<double>(x.size() - 1);
    return m;
}

}  // namespace

TEST(Philox, KnownAnswerVectors)
{
    using C = Philox4x32::Counter;
    EXPECT_EQ(Philox4x32::generate(C{0, 0, 0, 0}, {0, 0}), (C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
    const std::uint32_t ff = 0xffffffffu;
    EXPECT_EQ(Philox4x32::generate(C{ff, ff, ff, ff}, {ff, ff}),
              (C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(NoiseModel, Eigenvalues)
{
    const NoiseModel model = build_noise_model(2.0, 8, BasisKind::Cosine, mesh_ptr(2));
    EXPECT_EQ(model.mu(0, 0), 0.0);
    EXPECT_EQ(model.mu(1, 0), 1.0);
    EXPECT_EQ(model.mu(0, 1), 1.0);
    // 40-digit reference values of 2^-2.1 and 5^-2.1.
    EXPECT_NEAR(model.mu(1, 1) / 0.2332582478842018396350631243853792348158, 1.0, 2e-16);
    EXPECT_NEAR(model.mu(2, 1) / 0.03405359690083137926637785764665335356702, 1.0, 2e-16);
    for (int a = 0; a <= 8; ++a) {
        for (int b = 1; b <= 8; ++b) {
            EXPECT_LE(model.mu(a, b), model.mu(a, b - 1) + (a == 0 && b == 1 ? 1.0 : 0.0));
            EXPECT_LE(model.mu(b, a), model.mu(b - 1, a) + (a == 0 && b == 1 ? 1.0 : 0.0));
        }
    }
}

TEST(NoiseModel, RejectsBadParameters)
{
    EXPECT_THROW((void)build_noise_model(0.0, 8, BasisKind::Cosine, mesh_ptr(2)), UsageError);
    EXPECT_THROW((void)build_noise_model(2.5, 8, BasisKind::Cosine, mesh_ptr(2)), UsageError);
    EXPECT_THROW((void)build_noise_model(1.0, 0, BasisKind::Cosine, mesh_ptr(2)), UsageError);
    EXPECT_NO_THROW((void)build_noise_model(2.0, 1, BasisKind::Sine, mesh_ptr(2)));
}

TEST(NoiseModel, BasisValues)
{
    const NoiseModel cosine = build_noise_model(2.0, 4, BasisKind::Cosine, mesh_ptr(2));
    const NoiseModel sine = build_noise_model(2.0, 4, BasisKind::Sine, mesh_ptr(2));
    const Vec2 p{0.3, 0.7};
    EXPECT_NEAR(cosine.basis_value(2, 3, p), std::cos(2 * std::numbers::pi * 0.3) * std::cos(3 * std::numbers::pi * 0.7),
                1e-15);
    EXPECT_NEAR(sine.basis_value(1, 2, p), std::sin(std::numbers::pi * 0.3) * std::sin(2 * std::numbers::pi * 0.7),
                1e-15);
}

TEST(NoiseModel, FieldAtQuadratureMatchesDirectSeries)
{
    const auto mesh = mesh_ptr(3);
    const NoiseModel model = build_noise_model(1.0, 5, BasisKind::Cosine, mesh);
    std::mt19937_64 rng(4);
    const Eigen::VectorXd dw = random_vector(model.num_modes(), rng);
    Eigen::VectorXd field;
    model.field_at_quadrature(dw, field);
    const auto& rule = quadrature_rule();
    for (int t = 0; t < static_cast<int>(mesh->num_triangles()); ++t) {
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Vec2 x = mesh->to_cartesian(t, rule.points[q]);
            double g = 0.0;
            for (int a = 0; a <= 5; ++a) {
                for (int b = 0; b <= 5; ++b) {
                    g += std::sqrt(model.mu(a, b)) * dw[model.mode_index(a, b)] * std::cos(a * std::numbers::pi * x.x) *
                         std::cos(b * std::numbers::pi * x.y);
                }
            }
            EXPECT_NEAR(field[t * static_cast<Eigen::Index>(rule.size()) + static_cast<Eigen::Index>(q)], g, 1e-13);
        }
    }
    EXPECT_THROW(model.field_at_quadrature(Eigen::VectorXd::Zero(3), field), UsageError);
}

TEST(NoiseModel, TraceSums)
{
    // Plain trace converges quickly; the weighted sum only has shrinking increments (see the decisions log).
    auto sums = [](int l) {
        const NoiseModel model = build_noise_model(2.0, l, BasisKind::Cosine, mesh_ptr(1));
        double plain = 0.0;
        double weighted = 0.0;
        for (int a = 0; a <= l; ++a) {
            for (int b = 0; b <= l; ++b) {
                plain += model.mu(a, b);
                weighted += model.mu(a, b) * std::numbers::pi * std::numbers::pi * (a * a + b * b);
            }
        }
        return std::pair{plain, weighted};
    };
    const auto [p32, w32] = sums(32);
    const auto [p64, w64] = sums(64);
    const auto [p128, w128] = sums(128);
    EXPECT_LT(std::abs(p64 - p32) / p64, 0.02);
    EXPECT_GT(w64, w32);
    EXPECT_LT(w128 - w64, w64 - w32);
    (void)p128;
}

TEST(EvalB, Examples)
{
    using M = std::array<std::array<double, 2>, 2>;
    EXPECT_EQ(eval_B({0.0, 0.0}), (M{{{0.5, 0.5}, {0.5, 0.5}}}));
    const auto b1 = eval_B({std::sqrt(3.0), 0.0});
    EXPECT_NEAR(b1[0][0], 1.0, 1e-15);
    EXPECT_NEAR(b1[0][1], 1.0, 1e-15);
    EXPECT_EQ(b1[1][0], 0.5);
    const auto b2 = eval_B({0.0, std::sqrt(3.0)});
    EXPECT_EQ(b2[0][1], 0.5);
    EXPECT_NEAR(b2[1][1], 1.0, 1e-15);
    const auto b3 = eval_B({-7.0, 1e3});
    for (const auto& row : b3) {
        for (double v : row) {
            EXPECT_GE(v, 0.5);
        }
    }
}

TEST(Brownian, DeterministicAndOrderIndependent)
{
    const double dt = 1.0 / 512;
    const BrownianTableau a(4, dt, 33, 99, 5);
    const BrownianTableau b(4, dt, 33, 99, 5);
    const BrownianTableau prefix(4, dt, 10, 99, 5);
    const BrownianTableau other(4, dt, 33, 99, 6);
    int differ = 0;
    for (int l1 = 0; l1 <= 4; ++l1) {
        for (int l2 = 0; l2 <= 4; ++l2) {
            for (int s = 0; s < 33; ++s) {
                EXPECT_EQ(a.increment(l1, l2, s), b.increment(l1, l2, s));
                EXPECT_EQ(a.increment(l1, l2, s), std::sqrt(dt) * brownian_unit_normal(99, 5, l1, l2, s));
                if (s < 10) {
                    EXPECT_EQ(a.increment(l1, l2, s), prefix.increment(l1, l2, s));
                }
                differ += a.increment(l1, l2, s) != other.increment(l1, l2, s);
            }
        }
    }
    EXPECT_EQ(differ, 25 * 33);
}

TEST(Brownian, AggregateSumsFineIncrements)
{
    const BrownianTableau tab(3, 1.0 / 64, 64, 1, 2);
    Eigen::VectorXd coarse_total = Eigen::VectorXd::Zero(tab.num_modes());
    Eigen::VectorXd piece;
    for (int k = 0; k < 16; ++k) {
        tab.aggregate(4 * k, 4, piece);
        coarse_total += piece;
    }
    Eigen::VectorXd whole;
    tab.aggregate(0, 64, whole);
    EXPECT_LT((coarse_total - whole).cwiseAbs().maxCoeff(), 1e-13);
    tab.aggregate(8, 4, piece);
    EXPECT_EQ(piece[5], tab.increment(1, 1, 8) + tab.increment(1, 1, 9) + tab.increment(1, 1, 10) + tab.increment(1, 1, 11));
    EXPECT_THROW(tab.aggregate(60, 8, piece), UsageError);
}

TEST(Brownian, VarianceOfFourStepSumWithinThreeStandardErrors)
{
    const double dt = 1.0 / 512;
    const int draws = 10000;
    std::vector<double> sums(draws);
    Eigen::VectorXd agg;
    for (int s = 0; s < draws; ++s) {
        const BrownianTableau tab(1, dt, 4, 20240601, static_cast<std::uint64_t>(s));
        tab.aggregate(0, 4, agg);
        sums[static_cast<std::size_t>(s)] = agg[1];
    }
    const Moments m = moments(sums);
    const double target = 4 * dt;
    // Normal data: SE of the sample variance is sigma^2 sqrt(2/(N-1)), SE of the mean is sigma/sqrt(N).
    EXPECT_LE(std::abs(m.var - target), 3.0 * target * std::sqrt(2.0 / (draws - 1)));
    EXPECT_LE(std::abs(m.mean), 3.0 * std::sqrt(target / draws));
}

TEST(Brownian, DistinctSamplesAreUncorrelated)
{
    const int draws = 10000;
    std::vector<double> x(draws);
    std::vector<double> y(draws);
    for (int s = 0; s < draws; ++s) {
        x[static_cast<std::size_t>(s)] = brownian_unit_normal(7, static_cast<std::uint64_t>(s), 2, 3, 11);
        y[static_cast<std::size_t>(s)] = brownian_unit_normal(7, static_cast<std::uint64_t>(s + draws), 2, 3, 11);
    }
    const Moments mx = moments(x);
    const Moments my = moments(y);
    double cov = 0.0;
    for (int s = 0; s < draws; ++s) {
        cov += (x[static_cast<std::size_t>(s)] - mx.mean) * (y[static_cast<std::size_t>(s)] - my.mean);
    }
    cov /= draws - 1;
    const double rho = cov / std::sqrt(mx.var * my.var);
    EXPECT_LE(std::abs(rho), 3.0 / std::sqrt(static_cast<double>(draws)));
}

TEST(NoiseLoad, ZeroIncrementsGiveZeroLoad)
{
    const auto f = make_fixture(4);
    const NoiseModel model = build_noise_model(2.0, 6, BasisKind::Cosine, f.mesh);
    std::mt19937_64 rng(1);
    const FEFunction u(f.space, Role::Velocity, random_vector(f.space->num_velocity_dofs(), rng));
    const Eigen::VectorXd load = assemble_noise_load(f.space, model, u, Eigen::VectorXd::Zero(model.num_modes()));
    EXPECT_EQ(load.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_THROW((void)assemble_noise_load(f.space, model, u, Eigen::VectorXd::Zero(4)), UsageError);
}

TEST(NoiseLoad, SingleModeMatchesDenseIntegration)
{
    // u = 0 gives B(0)(G, G) = (G, G) with G = sqrt(mu_10) cos(pi x).
    const auto f = make_fixture(2);
    const NoiseModel model = build_noise_model(2.0, 4, BasisKind::Cosine, f.mesh);
    Eigen::VectorXd dw = Eigen::VectorXd::Zero(model.num_modes());
    dw[model.mode_index(1, 0)] = 1.0;
    const Eigen::VectorXd load = assemble_noise_load(f.space, model, FEFunction::zero(f.space, Role::Velocity), dw);

    // Centroid rule on a k x k subdivision of every triangle, in barycentric coordinates.
    const int k = 200;
    const int block = f.space->scalar_block_size();
    Eigen::VectorXd oracle = Eigen::VectorXd::Zero(load.size());
    const double s = std::sqrt(model.mu(1, 0));
    for (int t = 0; t < static_cast<int>(f.mesh->num_triangles()); ++t) {
        const double sub_area = f.mesh->signed_area(t) / (k * k);
        const auto dofs = f.space->scalar_dofs(t);
        auto add = [&](double l1, double l2) {
            const std::array<double, 3> bary{1.0 - l1 - l2, l1, l2};
            const Vec2 x = f.mesh->to_cartesian(t, bary);
            const double g = s * std::cos(std::numbers::pi * x.x) * sub_area;
            const auto phi = scalar_basis(bary);
            for (std::size_t a = 0; a < 4; ++a) {
                oracle[dofs[a]] += g * phi[a];
                oracle[block + dofs[a]] += g * phi[a];
            }
        };
        for (int i = 0; i < k; ++i) {
            for (int j = 0; i + j < k; ++j) {
                add((i + 1.0 / 3) / k, (j + 1.0 / 3) / k);
                if (i + j + 1 < k) {
                    add((i + 2.0 / 3) / k, (j + 2.0 / 3) / k);
                }
            }
        }
    }
    // The centroid rule error is O(k^-2) times second derivatives of order pi^2 / h^2.
    EXPECT_LT((load - oracle).cwiseAbs().maxCoeff(), 1e-5 * load.cwiseAbs().maxCoeff());
}

TEST(NoiseLoad, MatchesNaiveAssemblyOnTwoTriangles)
{
    const auto f = make_fixture(1);
    const int L = 4;
    const NoiseModel model = build_noise_model(2.0, L, BasisKind::Cosine, f.mesh);
    std::mt19937_64 rng(2);
    const FEFunction u(f.space, Role::Velocity, 3.0 * random_vector(f.space->num_velocity_dofs(), rng));
    const Eigen::VectorXd dw = random_vector(model.num_modes(), rng);
    const Eigen::VectorXd load = assemble_noise_load(f.space, model, u, dw);

    Eigen::VectorXd naive = Eigen::VectorXd::Zero(load.size());
    const auto& rule = quadrature_rule();
    const int block = f.space->scalar_block_size();
    for (int t = 0; t < 2; ++t) {
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Vec2 x = f.mesh->to_cartesian(t, rule.points[q]);
            const Vec2 ux = u.velocity_at(x);
            double g = 0.0;
            for (int a = 0; a <= L; ++a) {
                for (int b = 0; b <= L; ++b) {
                    const double mu = (a == 0 && b == 0) ? 0.0 : std::pow(a * a + b * b, -2.1);
                    g += std::sqrt(mu) * dw[a * (L + 1) + b] * std::cos(a * std::numbers::pi * x.x) *
                         std::cos(b * std::numbers::pi * x.y);
                }
            }
            const double w = rule.weights[q] * 2.0 * f.mesh->signed_area(t);
            const double v0 = std::sqrt(ux.x * ux.x + 1.0) * g;
            const double v1 = std::sqrt(ux.y * ux.y + 1.0) * g;
            const auto phi = scalar_basis(rule.points[q]);
            const auto dofs = f.space->scalar_dofs(t);
            for (std::size_t a = 0; a < 4; ++a) {
                naive[dofs[a]] += w * v0 * phi[a];
                naive[block + dofs[a]] += w * v1 * phi[a];
            }
        }
    }
    EXPECT_LT((load - naive).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(NoiseLoad, LinearInIncrements)
{
    const auto f = make_fixture(4);
    const NoiseModel model = build_noise_model(1.0, 8, BasisKind::Cosine, f.mesh);
    std::mt19937_64 rng(8);
    const FEFunction u(f.space, Role::Velocity, random_vector(f.space->num_velocity_dofs(), rng));
    for (int trial = 0; trial < 5; ++trial) {
        const Eigen::VectorXd d1 = random_vector(model.num_modes(), rng);
        const Eigen::VectorXd d2 = random_vector(model.num_modes(), rng);
        const double a = 0.7, b = -1.3;
        const Eigen::VectorXd lhs = assemble_noise_load(f.space, model, u, a * d1 + b * d2);
        const Eigen::VectorXd rhs =
            a * assemble_noise_load(f.space, model, u, d1) + b * assemble_noise_load(f.space, model, u, d2);
        EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(NoiseLoad, LipschitzInPreviousVelocity)
{
    const auto f = make_fixture(4);
    const NoiseModel model = build_noise_model(2.0, 8, BasisKind::Cosine, f.mesh);
    std::mt19937_64 rng(9);
    const FEFunction u(f.space, Role::Velocity, random_vector(f.space->num_velocity_dofs(), rng));
    const Eigen::VectorXd dir = random_vector(u.coeffs.size(), rng);
    const Eigen::VectorXd dw = random_vector(model.num_modes(), rng);
    const Eigen::VectorXd base = assemble_noise_load(f.space, model, u, dw);
    std::vector<double> quotients;
    for (double delta : {1e-2, 1e-3, 1e-4}) {
        const FEFunction up(f.space, Role::Velocity, u.coeffs + delta * dir);
        quotients.push_back((assemble_noise_load(f.space, model, up, dw) - base).norm() / delta);
    }
    for (double q : quotients) {
        EXPECT_LT(q, 2.0 * quotients.front() + 1e-12);
        EXPECT_GT(q, 0.5 * quotients.front());
    }
}
