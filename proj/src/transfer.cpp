#include "sstokes/transfer.hpp"

#include <string>
#include <utility>
#include <vector>

#include "sstokes/quadrature.hpp"

namespace sstokes {

QuadratureTransfer::QuadratureTransfer(std::shared_ptr<const MiniSpace> coarse, std::shared_ptr<const Mesh> fine)
    : coarse_(std::move(coarse)), fine_(std::move(fine))
{
    const Mesh& cm = coarse_->mesh();
    if (!cm.is_nested_in(*fine_)) {
        throw UsageError("transfer: mesh n=" + std::to_string(cm.n()) + " is not nested in mesh n=" +
                         std::to_string(fine_->n()));
    }
    const auto& rule = quadrature_rule();
    const auto nq = static_cast<Eigen::Index>(rule.size());
    const auto nt = static_cast<Eigen::Index>(fine_->num_triangles());
    const Eigen::Index npts = nt * nq;

    weights_.resize(npts);
    std::vector<Eigen::Triplet<double>> scalar;
    std::vector<Eigen::Triplet<double>> p1;
    scalar.reserve(static_cast<std::size_t>(npts) * 4);
    p1.reserve(static_cast<std::size_t>(npts) * 3);

    for (Eigen::Index t = 0; t < nt; ++t) {
        const double area = fine_->signed_area(static_cast<int>(t));
        for (Eigen::Index q = 0; q < nq; ++q) {
            const Eigen::Index k = t * nq + q;
            weights_[k] = rule.weights[static_cast<std::size_t>(q)] * 2.0 * area;
            const Vec2 x = fine_->to_cartesian(static_cast<int>(t), rule.points[static_cast<std::size_t>(q)]);
            const PointLocation loc = cm.locate(x);
            const auto phi = scalar_basis(loc.bary);
            const auto dofs = coarse_->scalar_dofs(loc.triangle);
            for (std::size_t a = 0; a < 4; ++a) {
                scalar.emplace_back(static_cast<int>(k), dofs[a], phi[a]);
            }
            for (std::size_t a = 0; a < 3; ++a) {
                p1.emplace_back(static_cast<int>(k), dofs[a], loc.bary[a]);
            }
        }
    }
    scalar_map_.resize(npts, coarse_->scalar_block_size());
    scalar_map_.setFromTriplets(scalar.begin(), scalar.end());
    p1_map_.resize(npts, coarse_->num_pressure_dofs());
    p1_map_.setFromTriplets(p1.begin(), p1.end());
}

Eigen::MatrixXd QuadratureTransfer::evaluate(const FEFunction& f) const
{
    if (f.space->mesh().n() != coarse_->mesh().n()) {
        throw UsageError("transfer: function does not live on the transfer's coarse space");
    }
    if (f.role == Role::Pressure) {
        Eigen::MatrixXd values(num_points(), 1);
        values.col(0) = p1_map_ * f.coeffs;
        return values;
    }
    const int block = coarse_->scalar_block_size();
    Eigen::MatrixXd values(num_points(), 2);
    values.col(0) = scalar_map_ * f.coeffs.head(block);
    values.col(1) = scalar_map_ * f.coeffs.tail(block);
    return values;
}

Eigen::MatrixXd evaluate_on_fine_quadrature(const FEFunction& f, std::shared_ptr<const Mesh> fine_mesh)
{
    return QuadratureTransfer(f.space, std::move(fine_mesh)).evaluate(f);
}

double weighted_l2_distance_sq(const Eigen::VectorXd& weights, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
    return weights.dot((a - b).rowwise().squaredNorm());
}

double weighted_l2_norm_sq(const Eigen::VectorXd& weights, const Eigen::MatrixXd& a)
{
    return weights.dot(a.rowwise().squaredNorm());
}

}  // namespace sstokes
