#include "leakloc/forward.hpp"

#include <cmath>

namespace leakloc {

int cfl_substeps(const StructuredMesh& mesh, const PhysicalParams& params, double delta,
                 double safety) {
    const double h = std::min(mesh.hx(), mesh.hy());
    const double diffusion_bound = h * h / params.k0;
    const double convection_bound = h / (params.c.lpNorm<Eigen::Infinity>() + 1e-300);
    const double dt_max = safety * std::min(diffusion_bound, convection_bound);
    if (delta <= dt_max) return 1;
    return static_cast<int>(std::ceil(delta / dt_max));
}

StateTrajectory solve_forward_load(const StructuredMesh& mesh, const OperatorSet& ops,
                                   const PhysicalParams& params, const Eigen::VectorXd& f,
                                   const Eigen::VectorXd& u0, const SimSpec& spec,
                                   bool record_substates) {
    const int n = mesh.n_nodes();
    const SpMat K = ops.combined(params.k0, params.c.x(), params.c.y());
    const Eigen::VectorXd minv = ops.M_lump.cwiseInverse();
    const double dt = spec.sub_dt();
    const int total = spec.total_substeps();

    StateTrajectory traj;
    traj.sub_dt = dt;
    traj.coarse.resize(n, spec.N_T + 1);
    if (record_substates) traj.substates.resize(n, total + 1);

    Eigen::VectorXd u = u0;
    for (int r : mesh.dirichlet_nodes) u[r] = 0.0;
    traj.coarse.col(0) = u;
    if (record_substates) traj.substates.col(0) = u;
    traj.min_value = u.minCoeff();

    Eigen::VectorXd rate(n);
    for (int i = 0; i < spec.N_T; ++i) {
        for (int s = 0; s < spec.n_sub; ++s) {
            rate.noalias() = f - K * u;
            u += dt * minv.cwiseProduct(rate);
            for (int r : mesh.dirichlet_nodes) u[r] = 0.0;
            if (record_substates) traj.substates.col(i * spec.n_sub + s + 1) = u;
        }
        if (!u.allFinite()) {
            throw SolverFailure("forward solve diverged at coarse step " + std::to_string(i) +
                                "; the sub-step count does not cover these parameters");
        }
        traj.coarse.col(i + 1) = u;
        traj.min_value = std::min(traj.min_value, u.minCoeff());
    }
    return traj;
}

StateTrajectory solve_forward(const StructuredMesh& mesh, const OperatorSet& ops,
                              const PhysicalParams& params, const DiracMeasure& mu,
                              const Eigen::VectorXd& u0, const SimSpec& spec,
                              bool record_substates) {
    return solve_forward_load(mesh, ops, params, source_load(mesh, mu), u0, spec,
                              record_substates);
}

}  // namespace leakloc
