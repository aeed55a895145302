#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "sstokes/mini_space.hpp"

namespace sstokes {

enum class BasisKind { Cosine, Sine };

/**
 * Truncated spectral description of the Q-Wiener process
 *
 *     W(t, x) = sum_{l1, l2 = 0..L} sqrt(mu_{l1 l2}) (phi_{l1 l2}(x), phi_{l1 l2}(x)) w_{l1 l2}(t)
 *
 * with mu_{00} = 0, mu_{l1 l2} = (l1^2 + l2^2)^{-(r + epsilon)} otherwise, and
 * phi_{l1 l2}(x) = cos(l1 pi x1) cos(l2 pi x2) (or the sine product).
 *
 * The model is bound to one structured mesh and caches the 1-D basis factors
 * at every quadrature abscissa, so evaluating the noise field at all
 * quadrature points is a small matrix product instead of a sum over modes
 * per point.
 */
class NoiseModel {
public:
    static constexpr double kEpsilon = 0.1;
    static constexpr int kCellPoints = 24;  // 12 points in each of the two cell triangles

    NoiseModel(double r, int truncation, BasisKind basis, std::shared_ptr<const Mesh> mesh, bool silent = false);

    [[nodiscard]] double r() const { return r_; }
    [[nodiscard]] double epsilon() const { return kEpsilon; }
    [[nodiscard]] int truncation() const { return truncation_; }
    [[nodiscard]] BasisKind basis() const { return basis_; }
    [[nodiscard]] bool silent() const { return silent_; }
    [[nodiscard]] const Mesh& mesh() const { return *mesh_; }
    [[nodiscard]] const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }

    /// Modes per index direction (L + 1) and in total.
    [[nodiscard]] int modes_per_axis() const { return truncation_ + 1; }
    [[nodiscard]] int num_modes() const { return modes_per_axis() * modes_per_axis(); }
    [[nodiscard]] int mode_index(int l1, int l2) const { return l1 * modes_per_axis() + l2; }

    [[nodiscard]] double mu(int l1, int l2) const { return mu_[static_cast<std::size_t>(mode_index(l1, l2))]; }
    [[nodiscard]] const std::vector<double>& mu() const { return mu_; }

    /// phi_{l1 l2}(p).
    [[nodiscard]] double basis_value(int l1, int l2, Vec2 p) const;

    /// Same spectral data bound to another mesh.
    [[nodiscard]] NoiseModel on_mesh(std::shared_ptr<const Mesh> mesh) const;

    /**
     * Scalar noise field G(x) = sum sqrt(mu) dW phi(x) at every quadrature
     * point of the bound mesh, ordered triangle-major (t * 12 + q).
     */
    void field_at_quadrature(const Eigen::VectorXd& increments, Eigen::VectorXd& out) const;

private:
    using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    double r_;
    int truncation_;
    BasisKind basis_;
    bool silent_;
    std::shared_ptr<const Mesh> mesh_;
    std::vector<double> mu_;
    RowMatrix x_factors_;  // (n * 24) x (L + 1): 1-D basis at x abscissae of cell column i, local point k
    RowMatrix y_factors_;
};

[[nodiscard]] NoiseModel build_noise_model(double r, int truncation, BasisKind basis, std::shared_ptr<const Mesh> mesh);

/// Model with every mu set to zero (deterministic runs).
[[nodiscard]] NoiseModel zero_noise_model(int truncation, BasisKind basis, std::shared_ptr<const Mesh> mesh);

/// Default truncation: 32 for r = 2 and 64 for rougher noise.
[[nodiscard]] int default_truncation(double r);

/// 1-D factor of the spectral basis, cos(l pi x) or sin(l pi x).
[[nodiscard]] double basis_factor(BasisKind basis, int l, double x);

/// Diffusion matrix B(u) = 1/2 [[s1, s1], [s2, s2]], s_i = sqrt(u_i^2 + 1).
[[nodiscard]] std::array<std::array<double, 2>, 2> eval_B(Vec2 u);

/// Standard normal keyed by (seed, sample, l1, l2, step). Pure function.
[[nodiscard]] double brownian_unit_normal(std::uint64_t base_seed, std::uint64_t sample_index, int l1, int l2,
                                          std::int64_t step);

/**
 * Per-mode Brownian increments of one sample path on the finest time grid.
 * Entry (l1, l2, step) ~ N(0, finest_dt), independent across all indices and
 * a pure function of (base_seed, sample_index, l1, l2, step). Coarser steps
 * use sums of consecutive fine increments, which couples all step sizes to
 * the same path.
 */
class BrownianTableau {
public:
    BrownianTableau(int truncation, double finest_dt, int n_fine_steps, std::uint64_t base_seed,
                    std::uint64_t sample_index);

    [[nodiscard]] std::uint64_t base_seed() const { return base_seed_; }
    [[nodiscard]] std::uint64_t sample_index() const { return sample_index_; }
    [[nodiscard]] double finest_dt() const { return finest_dt_; }
    [[nodiscard]] int n_fine_steps() const { return n_fine_steps_; }
    [[nodiscard]] int truncation() const { return truncation_; }
    [[nodiscard]] int num_modes() const { return modes_; }

    [[nodiscard]] double increment(int l1, int l2, int step) const
    {
        return data_[static_cast<std::size_t>(step) * static_cast<std::size_t>(modes_) +
                     static_cast<std::size_t>(l1 * (truncation_ + 1) + l2)];
    }

    /// Sum of fine increments [first, first + count) for every mode.
    void aggregate(int first, int count, Eigen::VectorXd& out) const;

private:
    int truncation_;
    int modes_;
    double finest_dt_;
    int n_fine_steps_;
    std::uint64_t base_seed_;
    std::uint64_t sample_index_;
    std::vector<double> data_;  // step-major
};

[[nodiscard]] BrownianTableau sample_increments(const NoiseModel& model, double finest_dt, int n_fine_steps,
                                                std::uint64_t base_seed, std::uint64_t sample_index);

/**
 * Assembles (B(u_prev) dW, phi_i) for all velocity test functions with the
 * degree-6 rule. u_prev is evaluated at each quadrature point including its
 * bubble part. Holds scratch buffers; one instance per worker.
 */
class NoiseLoadAssembler {
public:
    NoiseLoadAssembler(std::shared_ptr<const MiniSpace> space, const NoiseModel& model);

    void assemble(const Eigen::VectorXd& u_prev, const Eigen::VectorXd& increments, Eigen::VectorXd& load);

private:
    std::shared_ptr<const MiniSpace> space_;
    const NoiseModel* model_;
    Eigen::VectorXd field_;
};

[[nodiscard]] Eigen::VectorXd assemble_noise_load(std::shared_ptr<const MiniSpace> space, const NoiseModel& model,
                                                  const FEFunction& u_prev, const Eigen::VectorXd& increments);

}  // namespace sstokes
