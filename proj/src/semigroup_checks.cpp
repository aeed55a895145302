#include "sstokes/semigroup_checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "sstokes/projection.hpp"
#include "sstokes/solver.hpp"

namespace sstokes {

namespace {

std::string describe_grid(const std::vector<double>& lambdas, double tau, int steps)
{
    std::ostringstream os;
    os.precision(6);
    os << "lambda[" << lambdas.size() << "] in [";
    if (!lambdas.empty()) {
        os << *std::min_element(lambdas.begin(), lambdas.end()) << ", "
           << *std::max_element(lambdas.begin(), lambdas.end());
    }
    os << "], tau=" << tau << ", n=1.." << steps;
    return os.str();
}

void require_grid(const std::vector<double>& lambdas, double tau, int steps)
{
    if (steps < 1 || !(tau > 0.0)) {
        throw UsageError("semigroup audit: need N >= 1 and tau > 0");
    }
    for (double l : lambdas) {
        if (!(l >= 0.0) || !std::isfinite(l)) {
            throw UsageError("semigroup audit: eigenvalue grid must lie in [0, inf)");
        }
    }
}

// log1p(z) - z, accurate for small z as well.
double log1p_minus_identity(double z)
{
    if (std::abs(z) < 1e-3) {
        double term = z;
        double sum = 0.0;
        for (int k = 2; k <= 8; ++k) {
            term *= -z;
            sum += term / k;
        }
        return sum;
    }
    return std::log1p(z) - z;
}

}  // namespace

std::string InequalityReport::to_text() const
{
    std::ostringstream os;
    os.precision(17);
    os << "name=" << name << '\n'
       << "grid=" << grid << '\n'
       << "constant=" << constant << '\n'
       << "threshold=" << threshold << '\n'
       << "passed=" << (passed ? "true" : "false") << '\n';
    for (const auto& [key, value] : details) {
        os << "detail." << key << '=' << value << '\n';
    }
    return os.str();
}

std::vector<double> logspace(double lo, double hi, int count)
{
    if (!(lo > 0.0) || !(hi >= lo) || count < 1) {
        throw UsageError("logspace: need 0 < lo <= hi and count >= 1");
    }
    std::vector<double> out(static_cast<std::size_t>(count));
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (int i = 0; i < count; ++i) {
        const double s = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
        out[static_cast<std::size_t>(i)] = std::pow(10.0, a + s * (b - a));
    }
    out.front() = lo;
    out.back() = hi;
    return out;
}

std::vector<double> standard_lambda_grid()
{
    return logspace(1e-2, 1e6, 200);
}

InequalityReport check_rational_stability(double gamma, double tau, const std::vector<double>& lambdas, int steps)
{
    if (!(gamma >= 0.0 && gamma <= 1.0)) {
        throw UsageError("check_rational_stability: gamma must lie in [0, 1]");
    }
    require_grid(lambdas, tau, steps);

    double sup = 0.0;
    for (double lambda : lambdas) {
        const double weight = std::pow(1.0 + lambda, 0.5 * gamma);
        const double log_r = -std::log1p(tau * lambda);
        for (int n = 1; n <= steps; ++n) {
            const double value = weight * std::exp(n * log_r) * std::pow(n * tau, 0.5 * gamma);
            sup = std::max(sup, value);
        }
    }

    InequalityReport report;
    std::ostringstream name;
    name << "rational_stability(gamma=" << gamma << ")";
    report.name = name.str();
    report.grid = describe_grid(lambdas, tau, steps);
    report.constant = sup;
    report.threshold = kAuditThreshold;
    report.passed = std::isfinite(sup) && sup <= report.threshold;
    return report;
}

double rational_error_function(int n, double z)
{
    if (z == 0.0) {
        return 0.0;
    }
    // e^{-nz} - (1+z)^{-n} = (1+z)^{-n} expm1(n (log1p z - z))
    const double rational = std::exp(-n * std::log1p(z));
    return rational * std::expm1(n * log1p_minus_identity(z));
}

InequalityReport check_Fn_bounds(double tau, const std::vector<double>& lambdas, int steps)
{
    require_grid(lambdas, tau, steps);

    double sup_smoothing = 0.0;
    double sup_time = 0.0;
    for (double lambda : lambdas) {
        const double z = tau * lambda;
        for (int n = 1; n <= steps; ++n) {
            const double f = std::abs(rational_error_function(n, z));
            if (z > 0.0) {
                sup_smoothing = std::max(sup_smoothing, f / std::sqrt(z));
            }
            sup_time = std::max(sup_time, f * std::sqrt(static_cast<double>(n)));
        }
    }

    InequalityReport report;
    report.name = "Fn_bounds";
    report.grid = describe_grid(lambdas, tau, steps);
    report.constant = std::max(sup_smoothing, sup_time);
    report.threshold = kAuditThreshold;
    report.passed = std::isfinite(report.constant) && report.constant <= report.threshold;
    report.details = {{"sup_over_sqrt_z", sup_smoothing}, {"sup_times_sqrt_n", sup_time}};
    return report;
}

InequalityReport check_discrete_energy_decay(std::shared_ptr<const AssembledOperators> ops, double tau,
                                             const FEFunction& v, int steps)
{
    if (steps < 1) {
        throw UsageError("check_discrete_energy_decay: N must be at least 1");
    }
    if (v.role != Role::Velocity || v.coeffs.size() != ops->space->num_velocity_dofs()) {
        throw UsageError("check_discrete_energy_decay: v is not a velocity on the operator space");
    }
    if (divergence_residual(*ops, v.coeffs) > 1e-9) {
        throw UsageError("check_discrete_energy_decay: v is not discretely divergence-free (project it first)");
    }

    const StepSystem system(ops, tau);
    const Eigen::VectorXd zero_load = Eigen::VectorXd::Zero(v.coeffs.size());
    const double initial = 0.5 * v.coeffs.dot(ops->mass * v.coeffs);

    Eigen::VectorXd w_prev = v.coeffs;
    Eigen::VectorXd w;
    Eigen::VectorXd p;
    double dissipation = 0.0;
    double increments = 0.0;
    double worst = initial > 0.0 ? 1.0 : 0.0;
    double final_energy = initial;
    for (int j = 1; j <= steps; ++j) {
        system.step(w_prev, zero_load, zero_load, w, p);
        const Eigen::VectorXd dw = w - w_prev;
        increments += 0.5 * dw.dot(ops->mass * dw);
        dissipation += tau * w.dot(ops->deformation * w);
        final_energy = 0.5 * w.dot(ops->mass * w);
        if (initial > 0.0) {
            worst = std::max(worst, (final_energy + dissipation) / initial);
        }
        w_prev.swap(w);
    }
    const double identity_residual =
        std::abs(final_energy + increments + dissipation - initial) / std::max(initial, 1.0);

    InequalityReport report;
    report.name = "discrete_energy_decay";
    std::ostringstream grid;
    grid << "n=" << ops->space->mesh().n() << ", tau=" << tau << ", N=" << steps;
    report.grid = grid.str();
    report.constant = worst;
    // The inequality holds with constant exactly 1; allow for rounding in the sums.
    report.threshold = 1.0 + 1e-12;
    report.passed = worst <= report.threshold && identity_residual <= 1e-9;
    report.details = {{"identity_residual", identity_residual},
                      {"initial_energy", initial},
                      {"final_energy", final_energy},
                      {"dissipation", dissipation},
                      {"increment_energy", increments}};
    return report;
}

InequalityReport check_projection_stability(const std::vector<int>& levels, int draws, std::uint64_t seed,
                                            DrawKind kind)
{
    if (levels.size() < 2) {
        throw UsageError("check_projection_stability: need at least two mesh levels");
    }
    if (draws < 1) {
        throw UsageError("check_projection_stability: need at least one draw per level");
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coefficient(-1.0, 1.0);
    std::vector<double> maxima;
    InequalityReport report;
    report.name = kind == DrawKind::Random ? "projection_stability" : "projection_stability(gradient)";

    std::ostringstream grid;
    grid << "n in {";
    for (std::size_t i = 0; i < levels.size(); ++i) {
        grid << (i ? "," : "") << levels[i];
    }
    grid << "}, draws=" << draws;
    report.grid = grid.str();

    for (int n : levels) {
        auto mesh = std::make_shared<const Mesh>(n);
        auto space = std::make_shared<const MiniSpace>(mesh);
        auto ops = std::make_shared<const AssembledOperators>(assemble_operators(space));
        const XhProjector projector(ops);

        const SparseMatrix h1 = ops->mass + ops->gradient;
        auto h1_norm = [&h1](const Eigen::VectorXd& c) { return std::sqrt(std::max(0.0, c.dot(h1 * c))); };

        double worst = 0.0;
        for (int d = 0; d < draws; ++d) {
            Eigen::VectorXd c;
            if (kind == DrawKind::Random) {
                c.resize(space->num_velocity_dofs());
                for (Eigen::Index i = 0; i < c.size(); ++i) {
                    c[i] = coefficient(rng);
                }
            } else {
                Eigen::VectorXd q(space->num_pressure_dofs());
                for (Eigen::Index i = 0; i < q.size(); ++i) {
                    q[i] = coefficient(rng);
                }
                c = ops->divergence.transpose() * q;
            }
            const FEFunction v(space, Role::Velocity, c);
            const Eigen::VectorXd w = projector.project(v).coeffs;
            const double denom = h1_norm(c);
            if (denom == 0.0) {
                continue;
            }
            worst = std::max(worst, (h1_norm(w) + h1_norm(c - w)) / denom);
        }
        maxima.push_back(worst);
        report.details.emplace_back("max_ratio_n" + std::to_string(n), worst);
    }

    double growth = 0.0;
    for (std::size_t i = 1; i < maxima.size(); ++i) {
        growth = std::max(growth, maxima[i] / maxima[i - 1]);
    }
    report.constant = growth;
    report.threshold = 1.25;
    report.passed = std::isfinite(growth) && growth <= report.threshold;
    return report;
}

}  // namespace sstokes
