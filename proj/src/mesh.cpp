#include "sstokes/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sstokes {

Mesh::Mesh(int n, int level) : n_(n), level_(level)
{
    if (n < 1) {
        throw UsageError("mesh: subdivisions per side must be >= 1, got " + std::to_string(n));
    }
    const auto nv = static_cast<std::size_t>(n + 1) * static_cast<std::size_t>(n + 1);
    vertices_.reserve(nv);
    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i <= n; ++i) {
            vertices_.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
        }
    }
    triangles_.reserve(2 * static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int ll = vertex_index(i, j);
            const int lr = vertex_index(i + 1, j);
            const int ur = vertex_index(i + 1, j + 1);
            const int ul = vertex_index(i, j + 1);
            triangles_.push_back({ll, lr, ur});
            triangles_.push_back({ll, ur, ul});
        }
    }
}

double Mesh::signed_area(int t) const
{
    const auto& tri = triangle(t);
    const Vec2& a = vertex(tri[0]);
    const Vec2& b = vertex(tri[1]);
    const Vec2& c = vertex(tri[2]);
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

Vec2 Mesh::to_cartesian(int t, const std::array<double, 3>& bary) const
{
    const auto& tri = triangle(t);
    Vec2 p;
    for (int k = 0; k < 3; ++k) {
        p.x += bary[k] * vertex(tri[k]).x;
        p.y += bary[k] * vertex(tri[k]).y;
    }
    return p;
}

namespace {

// Cell index along one axis. Grid lines belong to the lower cell so that
// edge points resolve to the smaller triangle index.
int axis_cell(double scaled, int n)
{
    const int k = static_cast<int>(std::ceil(scaled)) - 1;
    return std::clamp(k, 0, n - 1);
}

}  // namespace

PointLocation Mesh::locate(Vec2 p) const
{
    const double tol = kDomainTolerance;
    if (!(p.x >= -tol && p.x <= 1.0 + tol && p.y >= -tol && p.y <= 1.0 + tol)) {
        throw DomainError("locate: point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                          ") lies outside [0,1]^2");
    }
    const double sx = std::clamp(p.x, 0.0, 1.0) * n_;
    const double sy = std::clamp(p.y, 0.0, 1.0) * n_;
    const int i = axis_cell(sx, n_);
    const int j = axis_cell(sy, n_);
    const double s = std::clamp(sx - i, 0.0, 1.0);
    const double t = std::clamp(sy - j, 0.0, 1.0);

    PointLocation loc;
    const int c = cell_index(i, j);
    if (t <= s) {
        // lower triangle: (0,0), (1,0), (1,1)
        loc.triangle = 2 * c;
        loc.bary = {1.0 - s, s - t, t};
    } else {
        // upper triangle: (0,0), (1,1), (0,1)
        loc.triangle = 2 * c + 1;
        loc.bary = {1.0 - t, s, t - s};
    }
    return loc;
}

Mesh build_uniform_mesh(int n) { return Mesh(n); }

PointLocation locate_point(const Mesh& mesh, Vec2 p) { return mesh.locate(p); }

}  // namespace sstokes
