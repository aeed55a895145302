#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "sstokes/operators.hpp"

namespace sstokes {

/// Outcome of one empirical inequality audit. `passed` iff constant <= threshold.
struct InequalityReport {
    std::string name;
    std::string grid;
    double constant = 0.0;
    double threshold = 0.0;
    bool passed = false;
    /// Named auxiliary quantities (component constants, per-level maxima, ...).
    std::vector<std::pair<std::string, double>> details;

    /// One `key=value` line per field, then one `detail.<name>=value` per detail.
    [[nodiscard]] std::string to_text() const;
};

inline constexpr double kAuditThreshold = 10.0;

/// Logarithmically spaced points from lo to hi inclusive.
[[nodiscard]] std::vector<double> logspace(double lo, double hi, int count);

/// The default eigenvalue grid: 200 points over [1e-2, 1e6].
[[nodiscard]] std::vector<double> standard_lambda_grid();

/// sup over (lambda, 1 <= n <= N) of (1 + lambda)^{gamma/2} (1 + tau lambda)^{-n} t_n^{gamma/2}.
[[nodiscard]] InequalityReport check_rational_stability(double gamma, double tau, const std::vector<double>& lambdas,
                                                        int steps);

/**
 * With F_n(z) = exp(-n z) - (1 + z)^{-n}, the two constants
 *   sup |F_n(tau lambda)| / (tau lambda)^{1/2}  and  sup |F_n(tau lambda)| sqrt(n).
 * The reported constant is the larger one.
 */
[[nodiscard]] InequalityReport check_Fn_bounds(double tau, const std::vector<double>& lambdas, int steps);

/// F_n(z), computed without cancellation trouble for small z.
[[nodiscard]] double rational_error_function(int n, double z);

/**
 * Iterates w^j = (I + tau A_h)^{-1} w^{j-1}, w^0 = v, for N steps. The constant
 * is max over k of (1/2 |w^k|^2 + tau sum_{j<=k} a(w^j, w^j)) / (1/2 |v|^2),
 * threshold 1. Detail `identity_residual` is the relative defect of the exact
 * balance at step N, which must stay below 1e-9 for the report to pass.
 */
[[nodiscard]] InequalityReport check_discrete_energy_decay(std::shared_ptr<const AssembledOperators> ops,
                                                           double tau,
                                                           const FEFunction& v, int steps);

enum class DrawKind { Random, Gradient };

/**
 * For each n in `levels`, the largest (|P v|_{H1} + |v - P v|_{H1}) / |v|_{H1}
 * over `draws` random v_h. The constant is the worst growth factor between
 * consecutive levels, threshold 1.25. Per-level maxima are in the details.
 */
[[nodiscard]] InequalityReport check_projection_stability(const std::vector<int>& levels, int draws,
                                                          std::uint64_t seed = 20240601,
                                                          DrawKind kind = DrawKind::Random);

}  // namespace sstokes
