#include "sstokes/noise.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "sstokes/philox.hpp"
#include "sstokes/quadrature.hpp"

namespace sstokes {

namespace {

// Offsets of the 24 quadrature points inside a unit cell, lower triangle first.
std::array<Vec2, NoiseModel::kCellPoints> cell_point_offsets()
{
    const auto& rule = quadrature_rule();
    std::array<Vec2, NoiseModel::kCellPoints> offsets{};
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const auto& l = rule.points[q];
        offsets[q] = {l[1] + l[2], l[2]};
        offsets[q + rule.size()] = {l[1], l[1] + l[2]};
    }
    return offsets;
}

constexpr std::uint32_t kBrownianStreamTag = 0x5753u;

// Normals for fine steps 2*pair and 2*pair + 1 of one mode.
std::array<double, 2> brownian_pair(std::uint64_t base_seed, std::uint64_t sample_index, int l1, int l2,
                                    std::int64_t pair)
{
    const Philox4x32::Key key = {static_cast<std::uint32_t>(base_seed), static_cast<std::uint32_t>(base_seed >> 32)};
    const Philox4x32::Counter ctr = {
        static_cast<std::uint32_t>(sample_index),
        (static_cast<std::uint32_t>(l1) << 16) | static_cast<std::uint32_t>(l2),
        static_cast<std::uint32_t>(pair),
        (static_cast<std::uint32_t>(sample_index >> 32) << 16) ^ kBrownianStreamTag,
    };
    return normal_pair(Philox4x32::generate(ctr, key));
}

}  // namespace

double basis_factor(BasisKind basis, int l, double x)
{
    const double arg = l * std::numbers::pi * x;
    return basis == BasisKind::Cosine ? std::cos(arg) : std::sin(arg);
}

NoiseModel::NoiseModel(double r, int truncation, BasisKind basis, std::shared_ptr<const Mesh> mesh, bool silent)
    : r_(r), truncation_(truncation), basis_(basis), silent_(silent), mesh_(std::move(mesh))
{
    if (!(r > 0.0 && r <= 2.0)) {
        throw UsageError("noise: regularity r must lie in (0, 2], got " + std::to_string(r));
    }
    if (truncation < 1) {
        throw UsageError("noise: truncation level must be >= 1, got " + std::to_string(truncation));
    }
    const int m = modes_per_axis();
    mu_.assign(static_cast<std::size_t>(m) * static_cast<std::size_t>(m), 0.0);
    if (!silent_) {
        for (int l1 = 0; l1 < m; ++l1) {
            for (int l2 = 0; l2 < m; ++l2) {
                if (l1 == 0 && l2 == 0) {
                    continue;
                }
                mu_[static_cast<std::size_t>(mode_index(l1, l2))] =
                    std::pow(static_cast<double>(l1 * l1 + l2 * l2), -(r_ + kEpsilon));
            }
        }
    }

    const int n = mesh_->n();
    const auto offsets = cell_point_offsets();
    x_factors_.resize(static_cast<Eigen::Index>(n) * kCellPoints, m);
    y_factors_.resize(static_cast<Eigen::Index>(n) * kCellPoints, m);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < kCellPoints; ++k) {
            const Eigen::Index row = static_cast<Eigen::Index>(i) * kCellPoints + k;
            const double x = (i + offsets[static_cast<std::size_t>(k)].x) / n;
            const double y = (i + offsets[static_cast<std::size_t>(k)].y) / n;
            for (int l = 0; l < m; ++l) {
                x_factors_(row, l) = basis_factor(basis_, l, x);
                y_factors_(row, l) = basis_factor(basis_, l, y);
            }
        }
    }
}

double NoiseModel::basis_value(int l1, int l2, Vec2 p) const
{
    return basis_factor(basis_, l1, p.x) * basis_factor(basis_, l2, p.y);
}

NoiseModel NoiseModel::on_mesh(std::shared_ptr<const Mesh> mesh) const
{
    return NoiseModel(r_, truncation_, basis_, std::move(mesh), silent_);
}

void NoiseModel::field_at_quadrature(const Eigen::VectorXd& increments, Eigen::VectorXd& out) const
{
    if (increments.size() != num_modes()) {
        throw UsageError("noise: expected " + std::to_string(num_modes()) + " mode increments, got " +
                         std::to_string(increments.size()));
    }
    const int n = mesh_->n();
    const int nq = kQuadraturePoints;
    out.setZero(static_cast<Eigen::Index>(mesh_->num_triangles()) * nq);
    if (silent_) {
        return;
    }
    const int m = modes_per_axis();
    RowMatrix coeff(m, m);
    for (int l1 = 0; l1 < m; ++l1) {
        for (int l2 = 0; l2 < m; ++l2) {
            const int idx = mode_index(l1, l2);
            coeff(l1, l2) = std::sqrt(mu_[static_cast<std::size_t>(idx)]) * increments[idx];
        }
    }
    // partial[(j,k), l1] = sum_l2 Y[(j,k), l2] coeff(l1, l2)
    const RowMatrix partial = y_factors_ * coeff.transpose();
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const Eigen::Index tri0 = 2 * (static_cast<Eigen::Index>(j) * n + i);
            for (int k = 0; k < kCellPoints; ++k) {
                const Eigen::Index t = tri0 + k / nq;
                const Eigen::Index q = k % nq;
                out[t * nq + q] = x_factors_.row(static_cast<Eigen::Index>(i) * kCellPoints + k)
                                      .dot(partial.row(static_cast<Eigen::Index>(j) * kCellPoints + k));
            }
        }
    }
}

NoiseModel build_noise_model(double r, int truncation, BasisKind basis, std::shared_ptr<const Mesh> mesh)
{
    return NoiseModel(r, truncation, basis, std::move(mesh));
}

NoiseModel zero_noise_model(int truncation, BasisKind basis, std::shared_ptr<const Mesh> mesh)
{
    return NoiseModel(2.0, truncation, basis, std::move(mesh), true);
}

int default_truncation(double r) { return r >= 2.0 ? 32 : 64; }

std::array<std::array<double, 2>, 2> eval_B(Vec2 u)
{
    const double s1 = 0.5 * std::sqrt(u.x * u.x + 1.0);
    const double s2 = 0.5 * std::sqrt(u.y * u.y + 1.0);
    return {{{s1, s1}, {s2, s2}}};
}

double brownian_unit_normal(std::uint64_t base_seed, std::uint64_t sample_index, int l1, int l2, std::int64_t step)
{
    return brownian_pair(base_seed, sample_index, l1, l2, step >> 1)[static_cast<std::size_t>(step & 1)];
}

BrownianTableau::BrownianTableau(int truncation, double finest_dt, int n_fine_steps, std::uint64_t base_seed,
                                 std::uint64_t sample_index)
    : truncation_(truncation),
      modes_((truncation + 1) * (truncation + 1)),
      finest_dt_(finest_dt),
      n_fine_steps_(n_fine_steps),
      base_seed_(base_seed),
      sample_index_(sample_index)
{
    if (!(finest_dt > 0.0)) {
        throw UsageError("brownian tableau: finest step must be positive");
    }
    if (n_fine_steps < 0 || truncation < 0 || truncation >= (1 << 16)) {
        throw UsageError("brownian tableau: invalid step count or truncation");
    }
    const double scale = std::sqrt(finest_dt);
    data_.resize(static_cast<std::size_t>(n_fine_steps) * static_cast<std::size_t>(modes_));
    const int m = truncation + 1;
    // Steps come in pairs that share one Philox block.
    for (int l1 = 0; l1 < m; ++l1) {
        for (int l2 = 0; l2 < m; ++l2) {
            const std::size_t mode = static_cast<std::size_t>(l1 * m + l2);
            for (int step = 0; step < n_fine_steps; step += 2) {
                const auto pair = brownian_pair(base_seed, sample_index, l1, l2, step >> 1);
                data_[static_cast<std::size_t>(step) * modes_ + mode] = scale * pair[0];
                if (step + 1 < n_fine_steps) {
                    data_[static_cast<std::size_t>(step + 1) * modes_ + mode] = scale * pair[1];
                }
            }
        }
    }
}

void BrownianTableau::aggregate(int first, int count, Eigen::VectorXd& out) const
{
    if (first < 0 || count < 0 || first + count > n_fine_steps_) {
        throw UsageError("brownian tableau: step range [" + std::to_string(first) + ", " +
                         std::to_string(first + count) + ") exceeds " + std::to_string(n_fine_steps_) +
                         " fine steps");
    }
    out.setZero(modes_);
    for (int s = first; s < first + count; ++s) {
        out += Eigen::Map<const Eigen::VectorXd>(data_.data() + static_cast<std::size_t>(s) * modes_, modes_);
    }
}

BrownianTableau sample_increments(const NoiseModel& model, double finest_dt, int n_fine_steps,
                                  std::uint64_t base_seed, std::uint64_t sample_index)
{
    return BrownianTableau(model.truncation(), finest_dt, n_fine_steps, base_seed, sample_index);
}

NoiseLoadAssembler::NoiseLoadAssembler(std::shared_ptr<const MiniSpace> space, const NoiseModel& model)
    : space_(std::move(space)), model_(&model)
{
    if (space_->mesh().n() != model.mesh().n()) {
        throw UsageError("noise load: noise model is bound to a different mesh");
    }
}

void NoiseLoadAssembler::assemble(const Eigen::VectorXd& u_prev, const Eigen::VectorXd& increments,
                                  Eigen::VectorXd& load)
{
    if (u_prev.size() != space_->num_velocity_dofs()) {
        throw UsageError("noise load: velocity coefficient length mismatch");
    }
    model_->field_at_quadrature(increments, field_);
    load.setZero(space_->num_velocity_dofs());
    if (model_->silent()) {
        return;
    }
    const Mesh& mesh = space_->mesh();
    const auto& rule = quadrature_rule();
    const int nq = kQuadraturePoints;
    std::array<std::array<double, 4>, kQuadraturePoints> basis{};
    for (int q = 0; q < nq; ++q) {
        basis[static_cast<std::size_t>(q)] = scalar_basis(rule.points[static_cast<std::size_t>(q)]);
    }
    const int block = space_->scalar_block_size();
    for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
        const double jac = 2.0 * mesh.signed_area(t);
        const auto dofs = space_->scalar_dofs(t);
        double u0[4];
        double u1[4];
        for (int a = 0; a < 4; ++a) {
            u0[a] = u_prev[dofs[static_cast<std::size_t>(a)]];
            u1[a] = u_prev[block + dofs[static_cast<std::size_t>(a)]];
        }
        double acc0[4] = {};
        double acc1[4] = {};
        for (int q = 0; q < nq; ++q) {
            const auto& n = basis[static_cast<std::size_t>(q)];
            Vec2 u;
            for (int a = 0; a < 4; ++a) {
                u.x += n[static_cast<std::size_t>(a)] * u0[a];
                u.y += n[static_cast<std::size_t>(a)] * u1[a];
            }
            // B(u) applied to the vector-valued noise (G, G).
            const double g = field_[static_cast<Eigen::Index>(t) * nq + q];
            const auto b = eval_B(u);
            const double w = rule.weights[static_cast<std::size_t>(q)] * jac;
            const double v0 = w * (b[0][0] * g + b[0][1] * g);
            const double v1 = w * (b[1][0] * g + b[1][1] * g);
            for (int a = 0; a < 4; ++a) {
                acc0[a] += v0 * n[static_cast<std::size_t>(a)];
                acc1[a] += v1 * n[static_cast<std::size_t>(a)];
            }
        }
        for (int a = 0; a < 4; ++a) {
            load[dofs[static_cast<std::size_t>(a)]] += acc0[a];
            load[block + dofs[static_cast<std::size_t>(a)]] += acc1[a];
        }
    }
}

Eigen::VectorXd assemble_noise_load(std::shared_ptr<const MiniSpace> space, const NoiseModel& model,
                                    const FEFunction& u_prev, const Eigen::VectorXd& increments)
{
    NoiseLoadAssembler assembler(std::move(space), model);
    Eigen::VectorXd load;
    assembler.assemble(u_prev.coeffs, increments, load);
    return load;
}

}  // namespace sstokes
