#pragma once

#include <functional>
#include <string>
#include <vector>

#include "leakloc/adjoint.hpp"
#include "leakloc/forward.hpp"
#include "leakloc/observation.hpp"

namespace leakloc {

struct OptConfig {
    double tau = 0.99 / 4.0;        // measure step, 0.99 / L with L = 4
    double sigma = 0.99 / 4.0;      // diffusion/convection step
    double theta = 100.0;           // sliding scale
    double eps0 = 1e-8;             // inner tolerance schedule eps0 / (n+1)^2
    double merge_radius = 0.1;
    int merge_period = 10;          // 0 disables merging
    double merge_tol_rel = 1e-3;    // tolerance anchor, relative to the initial objective
    int max_outer = 5000;
    double slide_shrink = 0.5;
    int slide_max_tries = 5;        // total slide attempts; 0 skips sliding
    double weight_floor_rel = 1e-3; // reporting floor, relative to max rate
    bool fit_kc = true;
};

enum class Variant { Basic, Sliding };

struct Iterate {
    DiracMeasure mu;
    PhysicalParams params;
};

struct InverseProblem {
    const StructuredMesh& mesh;
    const OperatorSet& ops;
    const SpMat& A;
    Eigen::MatrixXd data;  // one row per beam, one column per observed time
    SimSpec spec;
    RegConfig reg;
};

struct IterationRecord {
    int iter = 0;
    double value = 0.0;
    double cpu_time = 0.0;
    int n_spikes = 0;
    int inner_iters = 0;
    double k0 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    int slide = 0;
    int merged = 0;
};

struct InnerSolveResult {
    std::vector<double> rates;
    int sweeps = 0;
    bool converged = true;
};

struct StepStats {
    int inner_iters = 0;
    bool inner_converged = true;
    double certificate = 0.0;
    bool slide_accepted = false;
    int merge_events = 0;
};

struct RunResult {
    Iterate state;
    std::vector<IterationRecord> log;
    ObjectiveParts objective;
};

// lowest-index vertex minimizing the piecewise-linear field
int insert_candidate(const Eigen::VectorXd& v_field);

// cyclic coordinate descent on the rate surrogate
//   sum_i v_i (b_i - p_i) + alpha sum_i b_i + (1/2 tau) (sum_i |b_i - p_i|)^2,  b >= 0
// terminated on the per-coordinate subgradient residual; sweep_values, when
// given, receives the surrogate value after every sweep
InnerSolveResult inner_weight_solve(const std::vector<double>& v_values,
                                    const std::vector<double>& prev_rates,
                                    double alpha, double tau, double eps,
                                    std::vector<double>* sweep_values = nullptr);

// stationarity residual of the surrogate: (a) no profitable insertion anywhere
// on the mesh, (b) active rates, (c) zero rates
double optimality_certificate(const Eigen::VectorXd& v_field,
                              const std::vector<double>& v_support,
                              const std::vector<double>& rates,
                              const std::vector<double>& prev_rates,
                              double alpha, double tau);

// minimizer of (1/2 sigma)(x - temp)^2 + (weight/2)(x - ref)^2 over [lo, hi]
double prox_box_quadratic(double temp, double weight, double ref,
                          double lo, double hi, double sigma);

PhysicalParams kc_prox(const PhysicalParams& p, double g_k,
                       const Eigen::Vector2d& g_c, const RegConfig& reg,
                       double sigma);

// transport every spike by -step * grad, clamped to the closed domain
DiracMeasure slide_measure(const StructuredMesh& mesh, const DiracMeasure& mu,
                           const std::vector<Eigen::Vector2d>& spike_grads,
                           double step);

// insertion + inner rate solve + zero-rate pruning + (k, c) prox
Iterate fb_step(const InverseProblem& prob, const Iterate& x,
                const GradientBundle& g, const OptConfig& cfg, int outer_iter,
                StepStats* stats = nullptr);

struct MergeOutcome {
    DiracMeasure mu;
    int accepted = 0;
    double objective = 0.0;  // objective at the returned measure
};

// single greedy pass over spike pairs within radius, farthest first; the m-th
// accepted merge of the pass is tolerated up to tol0 * 0.9^m above the running
// objective
MergeOutcome merge_spikes(const DiracMeasure& mu, double radius,
                          const std::function<double(const DiracMeasure&)>& objective_eval,
                          double f_current, double tol0, int events_before);

ObjectiveParts evaluate_objective(const InverseProblem& prob, const Iterate& x);

RunResult run_optimizer(const InverseProblem& prob, const OptConfig& cfg,
                        Variant variant,
                        const std::function<void(int, const Iterate&)>& observer = {});

}  // namespace leakloc
