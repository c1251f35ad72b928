#pragma once

#include <vector>

#include <Eigen/Dense>

#include "leakloc/forward.hpp"
#include "leakloc/observation.hpp"

namespace leakloc {

// Quadratic references and box constraints for the parameter fit; alpha is
// the Radon-norm weight. k_ref/c_ref are the noisy parameter measurements
// the quadratic penalties pull toward.
struct RegConfig {
    double alpha = 1.5e-6;
    double k_weight = 3.0;
    double c_weight = 5e-4;
    double k_min = 0.001;
    double k_max = 1.0;
    double c_min = -1.0;
    double c_max = 1.0;
    double k_ref = 0.01;
    Eigen::Vector2d c_ref = Eigen::Vector2d::Zero();
};

struct ObjectiveParts {
    double misfit = 0.0;      // 1/2 mean of squared data residuals
    double radon = 0.0;       // alpha * total rate
    double kc_penalty = 0.0;  // quadratic parameter penalties
    double total = 0.0;
    bool feasible = true;  // box constraints and rate nonnegativity
};

ObjectiveParts objective(const SpMat& A, const Eigen::MatrixXd& coarse_states,
                         const Eigen::MatrixXd& b, const DiracMeasure& mu,
                         const PhysicalParams& params, const RegConfig& reg);

// Backward sweep of the exact transpose of the forward recursion: terminal
// state 0, one injection of A^T (residual column i) at sub-step i*n_sub.
// Returns the adjoint states at every sub-step (n_nodes x (N_T*n_sub+1)).
Eigen::MatrixXd solve_adjoint(const StructuredMesh& mesh, const OperatorSet& ops,
                              const PhysicalParams& params, const SpMat& A,
                              const Eigen::MatrixXd& residual, const SimSpec& spec);

// Adjoint of the linear map (load vector f) -> (observed data): pairs with
// data-space y so that <observe(solve(f)), y> = <f, adjoint_load_map(y)>.
Eigen::VectorXd adjoint_load_map(const StructuredMesh& mesh, const OperatorSet& ops,
                                 const PhysicalParams& params, const SpMat& A,
                                 const Eigen::MatrixXd& y, const SimSpec& spec);

// All derivatives of the data-misfit part at the current state, linear in the
// residual argument: pass the raw residual for derivatives of the plain sum of
// squares, or residual / n_data for derivatives of the mean misfit used in the
// objective. v_field is the nodal dual field: v(xi) is the misfit derivative
// of a unit rate added at xi; g_k and g_c are the misfit derivatives in the
// diffusion and convection parameters. Per-spike values and spatial gradients
// of v are evaluated at the measure's spike locations (gradients averaged over
// the containing elements at edges/vertices).
struct GradientBundle {
    Eigen::VectorXd v_field;
    double g_k = 0.0;
    Eigen::Vector2d g_c = Eigen::Vector2d::Zero();
    std::vector<double> spike_v;
    std::vector<Eigen::Vector2d> spike_grad;
};

GradientBundle gradient(const StructuredMesh& mesh, const OperatorSet& ops,
                        const PhysicalParams& params, const DiracMeasure& mu,
                        const StateTrajectory& traj, const SpMat& A,
                        const Eigen::MatrixXd& residual, const SimSpec& spec);

// Piecewise-linear interpolation of a nodal field and its (element-averaged)
// spatial gradient at a point.
double eval_field(const StructuredMesh& mesh, const Eigen::VectorXd& field, double px,
                  double py);
Eigen::Vector2d eval_field_gradient(const StructuredMesh& mesh, const Eigen::VectorXd& field,
                                    double px, double py);

}  // namespace leakloc
