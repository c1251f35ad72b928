#pragma once

#include <stdexcept>

#include <Eigen/Dense>

#include "leakloc/assembly.hpp"
#include "leakloc/mesh.hpp"

namespace leakloc {

struct PhysicalParams {
    double k0 = 0.01;
    Eigen::Vector2d c = Eigen::Vector2d::Zero();
};

// Time grid: N_T coarse steps of length T/N_T, each integrated with n_sub
// explicit sub-steps. Observations live on the coarse grid; the sub-step
// count is the caller's to raise whenever stability demands it.
struct SimSpec {
    double T = 1.0;
    int N_T = 50;
    double cfl_safety = 0.25;
    int n_sub = 1;

    double coarse_dt() const { return T / N_T; }
    double sub_dt() const { return coarse_dt() / n_sub; }
    int total_substeps() const { return N_T * n_sub; }
};

struct SolverFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Smallest n_sub >= 1 with delta/n_sub <= safety * min(h^2/k0, h/(|c|_inf)),
// h the minimum node spacing. The 1/4 safety margin of the standard explicit
// diffusion bound is folded into the safety factor (default 0.25).
int cfl_substeps(const StructuredMesh& mesh, const PhysicalParams& params, double delta,
                 double safety);

struct StateTrajectory {
    Eigen::MatrixXd coarse;     // n_nodes x (N_T+1), states at coarse times
    Eigen::MatrixXd substates;  // n_nodes x (N_T*n_sub+1) when recorded, else 0x0
    double sub_dt = 0.0;
    double min_value = 0.0;  // monitored: most negative nodal value seen

    bool has_substates() const { return substates.size() > 0; }
};

// Explicit lumped-mass integration of u' = M_lump^{-1}(f - K(x) u) with the
// Dirichlet value (0) re-imposed after every sub-step. Throws SolverFailure
// on non-finite values (CFL violation).
StateTrajectory solve_forward_load(const StructuredMesh& mesh, const OperatorSet& ops,
                                   const PhysicalParams& params, const Eigen::VectorXd& f,
                                   const Eigen::VectorXd& u0, const SimSpec& spec,
                                   bool record_substates = false);

StateTrajectory solve_forward(const StructuredMesh& mesh, const OperatorSet& ops,
                              const PhysicalParams& params, const DiracMeasure& mu,
                              const Eigen::VectorXd& u0, const SimSpec& spec,
                              bool record_substates = false);

}  // namespace leakloc
