#pragma once

#include <array>
#include <vector>

namespace sstokes {

/// Symmetric rule on the reference triangle (area 1/2). Points are given in
/// barycentric coordinates; weights sum to 1/2.
struct QuadratureRule {
    std::vector<std::array<double, 3>> points;
    std::vector<double> weights;

    [[nodiscard]] std::size_t size() const { return points.size(); }
};

/// 12-point degree-6 rule with positive weights and interior points.
/// Exact for every polynomial of total degree <= 6.
[[nodiscard]] const QuadratureRule& quadrature_rule();

inline constexpr int kQuadratureDegree = 6;
inline constexpr int kQuadraturePoints = 12;

}  // namespace sstokes
