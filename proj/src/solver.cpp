#include "sstokes/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "sstokes/projection.hpp"

namespace sstokes {

StepSystem::StepSystem(std::shared_ptr<const AssembledOperators> ops, double tau)
    : ops_(std::move(ops)),
      tau_(tau),
      solver_((tau > 0.0 ? SparseMatrix(ops_->mass + tau * ops_->deformation) : SparseMatrix(ops_->mass)),
              ops_->divergence)
{
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw UsageError("step system: time step must be positive and finite");
    }
    auto loads = constant_field_loads(*ops_->space);
    load_x_ = std::move(loads.first);
    load_y_ = std::move(loads.second);
}

SparseMatrix StepSystem::matrix() const
{
    const auto nu = static_cast<int>(ops_->mass.rows());
    const auto np = static_cast<int>(ops_->divergence.rows());
    const SparseMatrix a = ops_->mass + tau_ * ops_->deformation;
    std::vector<Eigen::Triplet<double>> triplets;
    for (int k = 0; k < a.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
            triplets.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
        }
    }
    for (int k = 0; k < ops_->divergence.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(ops_->divergence, k); it; ++it) {
            const int p = nu + static_cast<int>(it.row());
            const int v = static_cast<int>(it.col());
            triplets.emplace_back(p, v, it.value());
            triplets.emplace_back(v, p, -tau_ * it.value());
        }
    }
    SparseMatrix m(nu + np, nu + np);
    m.setFromTriplets(triplets.begin(), triplets.end());
    return m;
}

void StepSystem::solve(const Eigen::VectorXd& rhs_u, const Eigen::VectorXd& rhs_p, Eigen::VectorXd& u,
                       Eigen::VectorXd& p) const
{
    Eigen::VectorXd q;
    solver_.solve(rhs_u, rhs_p, u, q);
    p = q / tau_;
}

void StepSystem::step(const Eigen::VectorXd& u_prev, const Eigen::VectorXd& f_load,
                      const Eigen::VectorXd& noise_load, Eigen::VectorXd& u, Eigen::VectorXd& p) const
{
    const Eigen::VectorXd rhs = ops_->mass * u_prev + tau_ * f_load + noise_load;
    solve(rhs, Eigen::VectorXd::Zero(solver_.num_pressure()), u, p);
}

std::unique_ptr<StepSystem> build_step_system(std::shared_ptr<const AssembledOperators> ops, double tau)
{
    return std::make_unique<StepSystem>(std::move(ops), tau);
}

StepOutput euler_step(const StepSystem& system, const FEFunction& u_prev, const Eigen::VectorXd& f_load,
                      const Eigen::VectorXd& noise_load)
{
    const int nu = system.space().num_velocity_dofs();
    if (u_prev.role != Role::Velocity || u_prev.coeffs.size() != nu || f_load.size() != nu ||
        noise_load.size() != nu) {
        throw UsageError("euler_step: input dimensions do not match the velocity space");
    }
    if (!u_prev.coeffs.allFinite() || !f_load.allFinite() || !noise_load.allFinite()) {
        throw NumericalError("euler_step: non-finite values in the step inputs");
    }
    Eigen::VectorXd u;
    Eigen::VectorXd p;
    system.step(u_prev.coeffs, f_load, noise_load, u, p);
    auto space = system.ops().space;
    return {FEFunction(space, Role::Velocity, std::move(u)), FEFunction(space, Role::Pressure, std::move(p))};
}

SourceFunction constant_source(Vec2 value)
{
    return [value](double) { return value; };
}

int exact_ratio(double span, double step, const char* what)
{
    if (!(step > 0.0) || !(span > 0.0)) {
        throw UsageError(std::string(what) + ": non-positive time span or step");
    }
    const double ratio = span / step;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
        throw UsageError(std::string(what) + ": " + std::to_string(step) + " does not divide " +
                         std::to_string(span));
    }
    return static_cast<int>(rounded);
}

Trajectory run_trajectory(const StepSystem& system, const NoiseModel& model, double final_time,
                          const SourceFunction& source, const BrownianTableau& tableau,
                          const TrajectoryOptions& options)
{
    const double tau = system.tau();
    const int steps = exact_ratio(final_time, tau, "run_trajectory");
    const int fine_per_step = exact_ratio(tau, tableau.finest_dt(), "run_trajectory (tau vs finest_dt)");
    if (steps * fine_per_step > tableau.n_fine_steps()) {
        throw UsageError("run_trajectory: tableau covers " + std::to_string(tableau.n_fine_steps()) +
                         " fine steps, need " + std::to_string(steps * fine_per_step));
    }
    if (tableau.num_modes() != model.num_modes()) {
        throw UsageError("run_trajectory: tableau and noise model disagree on the mode count");
    }

    const AssembledOperators& ops = system.ops();
    const MiniSpace& space = *ops.space;
    NoiseLoadAssembler noise(ops.space, model);

    Trajectory traj;
    traj.tau = tau;
    traj.final_time = final_time;
    traj.num_steps = steps;
    traj.checkpoint_steps = options.checkpoint_steps.empty() ? std::vector<int>{steps} : options.checkpoint_steps;
    for (int s : traj.checkpoint_steps) {
        if (s < 0 || s > steps) {
            throw UsageError("run_trajectory: checkpoint step " + std::to_string(s) + " out of range");
        }
    }
    traj.pressure_integral = Eigen::VectorXd::Zero(space.num_pressure_dofs());
    traj.divergence_residuals.reserve(static_cast<std::size_t>(steps));
    traj.energy_residuals.reserve(static_cast<std::size_t>(steps));

    Eigen::VectorXd u_prev = Eigen::VectorXd::Zero(space.num_velocity_dofs());
    if (options.initial_velocity) {
        u_prev = XhProjector(system.ops_ptr()).project(*options.initial_velocity).coeffs;
    }
    auto record_checkpoint = [&traj](int step, const Eigen::VectorXd& u) {
        for (int s : traj.checkpoint_steps) {
            if (s == step) {
                traj.checkpoints.push_back(u);
            }
        }
    };
    record_checkpoint(0, u_prev);

    Eigen::VectorXd increments;
    Eigen::VectorXd noise_load;
    Eigen::VectorXd f_load;
    Eigen::VectorXd u;
    Eigen::VectorXd p;
    Eigen::VectorXd mu_prev = ops.mass * u_prev;
    for (int n = 1; n <= steps; ++n) {
        const double t = n * tau;
        tableau.aggregate((n - 1) * fine_per_step, fine_per_step, increments);
        noise.assemble(u_prev, increments, noise_load);
        const Vec2 f = source(t);
        f_load = f.x * system.unit_load_x() + f.y * system.unit_load_y();
        if (!u_prev.allFinite() || !noise_load.allFinite() || !f_load.allFinite()) {
            throw NumericalError("run_trajectory: non-finite state before step " + std::to_string(n));
        }
        system.step(u_prev, f_load, noise_load, u, p);

        traj.pressure_integral += tau * p;
        traj.divergence_residuals.push_back(divergence_residual(ops, u));

        const Eigen::VectorXd mu = ops.mass * u;
        const Eigen::VectorXd du = u - u_prev;
        const double l2_sq = u.dot(mu);
        const double l2_prev_sq = u_prev.dot(mu_prev);
        const double inc_sq = du.dot(ops.mass * du);
        const double dissipation = tau * u.dot(ops.deformation * u);
        const double lhs = 0.5 * l2_sq - 0.5 * l2_prev_sq + 0.5 * inc_sq + dissipation;
        const double rhs = tau * f_load.dot(u) + noise_load.dot(u);
        traj.energy_residuals.push_back(std::abs(lhs - rhs));
        traj.max_l2_sq = std::max(traj.max_l2_sq, l2_sq);
        traj.sum_increment_sq += inc_sq;
        traj.tau_sum_h1_sq += tau * (l2_sq + u.dot(ops.gradient * u));

        if (options.observer) {
            options.observer(StepRecord{n, t, &u_prev, &u, &p, &f_load, &noise_load});
        }
        record_checkpoint(n, u);
        u_prev.swap(u);
        mu_prev = mu;
    }
    return traj;
}

}  // namespace sstokes
