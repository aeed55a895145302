#include "sstokes/projection.hpp"

#include <utility>

namespace sstokes {

XhProjector::XhProjector(std::shared_ptr<const AssembledOperators> ops)
    : ops_(std::move(ops)), solver_(ops_->mass, ops_->divergence)
{
}

FEFunction XhProjector::project(const FEFunction& v) const
{
    if (v.role != Role::Velocity) {
        throw UsageError("project_Xh: argument must be a velocity function");
    }
    if (v.space.get() != ops_->space.get()) {
        throw UsageError("project_Xh: function lives on a different space");
    }
    return project_load(ops_->mass * v.coeffs);
}

FEFunction XhProjector::project(const VectorField& v) const
{
    return project_load(velocity_load(*ops_->space, v));
}

FEFunction XhProjector::project_load(const Eigen::VectorXd& load) const
{
    Eigen::VectorXd w;
    Eigen::VectorXd q;
    solver_.solve(load, Eigen::VectorXd::Zero(solver_.num_pressure()), w, q);
    return FEFunction(ops_->space, Role::Velocity, std::move(w));
}

FEFunction project_Xh(std::shared_ptr<const AssembledOperators> ops, const FEFunction& v)
{
    return XhProjector(std::move(ops)).project(v);
}

FEFunction project_Xh(std::shared_ptr<const AssembledOperators> ops, const VectorField& v)
{
    return XhProjector(std::move(ops)).project(v);
}

double divergence_residual(const AssembledOperators& ops, const Eigen::VectorXd& u)
{
    const Eigen::VectorXd bu = ops.divergence * u;
    const double worst = bu.size() > 0 ? bu.cwiseAbs().maxCoeff() : 0.0;
    return worst / (1.0 + u.norm());
}

}  // namespace sstokes
