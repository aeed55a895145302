#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace sstokes {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/// Raised for points outside [0,1]^2 and other geometric domain violations.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised when an operation is called with arguments that violate its contract.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

using Triangle = std::array<int, 3>;

/// Result of a point query: owning triangle and barycentric weights with
/// respect to that triangle's vertices (in the stored vertex order).
struct PointLocation {
    int triangle = -1;
    std::array<double, 3> bary{};
};

/**
 * Uniform triangulation of the unit square.
 *
 * Cell (i, j) covers [i/n, (i+1)/n] x [j/n, (j+1)/n] and is split along the
 * diagonal from its lower-left to its upper-right corner. Triangle 2c is the
 * lower one, 2c+1 the upper one, where c = j*n + i. Vertex (i, j) has index
 * j*(n+1) + i. The pattern is nested under n -> 2n.
 */
class Mesh {
public:
    static constexpr double kDomainTolerance = 1e-12;

    explicit Mesh(int n, int level = 0);

    [[nodiscard]] int n() const { return n_; }
    [[nodiscard]] int level() const { return level_; }
    [[nodiscard]] double h() const { return 1.0 / n_; }

    [[nodiscard]] std::size_t num_vertices() const { return vertices_.size(); }
    [[nodiscard]] std::size_t num_triangles() const { return triangles_.size(); }

    [[nodiscard]] const std::vector<Vec2>& vertices() const { return vertices_; }
    [[nodiscard]] const std::vector<Triangle>& triangles() const { return triangles_; }
    [[nodiscard]] const Vec2& vertex(int v) const { return vertices_[static_cast<std::size_t>(v)]; }
    [[nodiscard]] const Triangle& triangle(int t) const { return triangles_[static_cast<std::size_t>(t)]; }

    [[nodiscard]] int vertex_index(int i, int j) const { return j * (n_ + 1) + i; }
    [[nodiscard]] int cell_index(int i, int j) const { return j * n_ + i; }

    /// Signed area (positive for counterclockwise orientation).
    [[nodiscard]] double signed_area(int t) const;

    /// Maps barycentric weights on triangle t to Cartesian coordinates.
    [[nodiscard]] Vec2 to_cartesian(int t, const std::array<double, 3>& bary) const;

    /// O(1) lookup through the grid index. Points on shared edges go to the
    /// triangle with the smaller index. Throws DomainError outside the square.
    [[nodiscard]] PointLocation locate(Vec2 p) const;

    /// Mesh at 2n with level + 1.
    [[nodiscard]] Mesh refined() const { return Mesh(2 * n_, level_ + 1); }

    /// True when every vertex and edge of this mesh is carried by `fine`.
    [[nodiscard]] bool is_nested_in(const Mesh& fine) const { return fine.n_ % n_ == 0; }

private:
    int n_;
    int level_;
    std::vector<Vec2> vertices_;
    std::vector<Triangle> triangles_;
};

/// Builds the uniform mesh with n subdivisions per side; rejects n < 1.
[[nodiscard]] Mesh build_uniform_mesh(int n);

/// Free-function form of Mesh::locate.
[[nodiscard]] PointLocation locate_point(const Mesh& mesh, Vec2 p);

}  // namespace sstokes
