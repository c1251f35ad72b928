#include "leakloc/simulate.hpp"

#include <algorithm>
#include <cmath>

namespace leakloc {

SimulatedData simulate_data(const StructuredMesh& mesh, const OperatorSet& ops,
                            const std::vector<Beam>& beams, int n_seg,
                            const PhysicalParams& truth_params,
                            const DiracMeasure& truth_mu, const SimSpec& spec,
                            const NoiseSpec& noise, std::uint64_t seed) {
    SimulatedData out;
    const int refine = noise.mitigate_inverse_crime ? 2 : 1;

    SimSpec truth_spec = spec;
    truth_spec.n_sub = refine * std::max(spec.n_sub,
                                         cfl_substeps(mesh, truth_params,
                                                      spec.coarse_dt(), spec.cfl_safety));
    out.truth_n_sub = truth_spec.n_sub;

    const SpMat A_truth = assemble_observation(mesh, beams, refine * n_seg);
    const Eigen::VectorXd u0 = Eigen::VectorXd::Zero(mesh.n_nodes());
    const auto traj = solve_forward(mesh, ops, truth_params, truth_mu, u0, truth_spec);
    out.clean = observe(A_truth, traj.coarse);

    DetRng rng(seed);
    out.k_ref = std::clamp(truth_params.k0 * (1.0 + noise.k_level * rng.normal()),
                           0.001, 1.0);
    out.c_ref.x() = std::clamp(truth_params.c.x() * (1.0 + noise.c_level * rng.normal()),
                               -1.0, 1.0);
    out.c_ref.y() = std::clamp(truth_params.c.y() * (1.0 + noise.c_level * rng.normal()),
                               -1.0, 1.0);

    const double rms = std::sqrt(out.clean.squaredNorm() / double(out.clean.size()));
    out.b = out.clean;
    for (Eigen::Index r = 0; r < out.b.rows(); ++r)
        for (Eigen::Index c = 0; c < out.b.cols(); ++c)
            out.b(r, c) += noise.data_level * rms * rng.normal();
    return out;
}

}  // namespace leakloc
