#pragma once

#include <Eigen/Core>

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "sstokes/noise.hpp"
#include "sstokes/operators.hpp"
#include "sstokes/saddle_point.hpp"

namespace sstokes {

/**
 * Constant-in-time operator of the semi-implicit Euler step
 *
 *     [ M + tau K_d   -tau B^T ] [u^n]   [M u^{n-1} + tau f_n + xi_n]
 *     [ B              0       ] [p^n] = [0                         ]
 *
 * factorized once and shared read-only by all sample paths. Internally the
 * pressure unknown is scaled to tau p so the factorization does not degrade
 * as tau -> 0.
 */
class StepSystem {
public:
    StepSystem(std::shared_ptr<const AssembledOperators> ops, double tau);

    [[nodiscard]] double tau() const { return tau_; }
    [[nodiscard]] const AssembledOperators& ops() const { return *ops_; }
    [[nodiscard]] const std::shared_ptr<const AssembledOperators>& ops_ptr() const { return ops_; }
    [[nodiscard]] const MiniSpace& space() const { return *ops_->space; }

    /// Load vectors of the unit sources (1,0) and (0,1).
    [[nodiscard]] const Eigen::VectorXd& unit_load_x() const { return load_x_; }
    [[nodiscard]] const Eigen::VectorXd& unit_load_y() const { return load_y_; }

    /// The block matrix above in (u, p) unknowns (built on request).
    [[nodiscard]] SparseMatrix matrix() const;

    /// Solves the block system for arbitrary right-hand sides.
    void solve(const Eigen::VectorXd& rhs_u, const Eigen::VectorXd& rhs_p, Eigen::VectorXd& u,
               Eigen::VectorXd& p) const;

    /// One Euler step with rhs (M u_prev + tau f_load + noise_load, 0).
    void step(const Eigen::VectorXd& u_prev, const Eigen::VectorXd& f_load, const Eigen::VectorXd& noise_load,
              Eigen::VectorXd& u, Eigen::VectorXd& p) const;

private:
    std::shared_ptr<const AssembledOperators> ops_;
    double tau_;
    SaddlePointSolver solver_;
    Eigen::VectorXd load_x_;
    Eigen::VectorXd load_y_;
};

[[nodiscard]] std::unique_ptr<StepSystem> build_step_system(std::shared_ptr<const AssembledOperators> ops,
                                                            double tau);

struct StepOutput {
    FEFunction u;
    FEFunction p;
};

/// Validated single step on FEFunctions; rejects non-finite inputs.
[[nodiscard]] StepOutput euler_step(const StepSystem& system, const FEFunction& u_prev, const Eigen::VectorXd& f_load,
                                    const Eigen::VectorXd& noise_load);

using SourceFunction = std::function<Vec2(double t)>;

/// Spatially constant source f(t) = value.
[[nodiscard]] SourceFunction constant_source(Vec2 value);

/// Everything known about one step, passed to observers.
struct StepRecord {
    int step = 0;
    double time = 0.0;
    const Eigen::VectorXd* u_prev = nullptr;
    const Eigen::VectorXd* u = nullptr;
    const Eigen::VectorXd* p = nullptr;
    const Eigen::VectorXd* f_load = nullptr;
    const Eigen::VectorXd* noise_load = nullptr;
};

struct TrajectoryOptions {
    /// Steps at which the velocity is stored; empty means the final step only.
    std::vector<int> checkpoint_steps;
    /// Initial velocity; it is projected onto X_h. Absent means zero.
    std::optional<FEFunction> initial_velocity;
    std::function<void(const StepRecord&)> observer;
};

struct Trajectory {
    double tau = 0.0;
    double final_time = 0.0;
    int num_steps = 0;
    std::vector<int> checkpoint_steps;
    std::vector<Eigen::VectorXd> checkpoints;
    /// tau * sum_{k <= N} p^k as P1 coefficients.
    Eigen::VectorXd pressure_integral;
    std::vector<double> divergence_residuals;
    /// |lhs - rhs| of the per-step energy identity obtained by testing with u^n.
    std::vector<double> energy_residuals;
    double max_l2_sq = 0.0;
    double sum_increment_sq = 0.0;
    double tau_sum_h1_sq = 0.0;

    [[nodiscard]] const Eigen::VectorXd& final_velocity() const { return checkpoints.back(); }
};

/**
 * Runs the scheme to final_time on one noise path. Step n uses the tableau
 * increments of fine steps [(n-1)k, nk), k = tau / finest_dt.
 */
[[nodiscard]] Trajectory run_trajectory(const StepSystem& system, const NoiseModel& model, double final_time,
                                        const SourceFunction& source, const BrownianTableau& tableau,
                                        const TrajectoryOptions& options = {});

/// Number of steps of size `step` in `span`; throws UsageError unless exact.
int exact_ratio(double span, double step, const char* what);

}  // namespace sstokes
