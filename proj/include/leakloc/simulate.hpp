#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "leakloc/forward.hpp"
#include "leakloc/observation.hpp"

namespace leakloc {

// Deterministic noise source: a fixed engine and a fixed draw discipline so
// that a seed pins every simulated byte across platforms.
class DetRng {
  public:
    explicit DetRng(std::uint64_t seed) : engine_(seed) {}

    // uniform in (0, 1]
    double uniform() {
        while (true) {
            const double u = double(engine_() >> 11) * 0x1.0p-53;
            if (u > 0.0) return u;
        }
    }

    // standard normal via Box-Muller; the second value of each pair is cached
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * std::numbers::pi * u2;
        cached_ = r * std::sin(phi);
        has_cached_ = true;
        return r * std::cos(phi);
    }

  private:
    std::mt19937_64 engine_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

struct NoiseSpec {
    double data_level = 0.01;
    double k_level = 0.02;
    double c_level = 0.2;
    bool mitigate_inverse_crime = true;
};

struct SimulatedData {
    Eigen::MatrixXd b;       // noisy observations, beams x N_T
    Eigen::MatrixXd clean;   // noiseless observations at the truth resolution
    double k_ref = 0.0;      // perturbed diffusion prior center
    Eigen::Vector2d c_ref;   // perturbed convection prior center
    int truth_n_sub = 1;     // sub-steps used for the ground-truth solve
};

// Generates observations from the ground truth. The truth trajectory uses its
// own CFL-derived sub-step count and, with mitigation on, twice that count and
// twice the beam quadrature resolution, so reconstruction never inverts the
// exact operator that produced the data. Draw order under one seed: k, c1,
// c2, then data noise row-major (beam outer, time inner).
SimulatedData simulate_data(const StructuredMesh& mesh, const OperatorSet& ops,
                            const std::vector<Beam>& beams, int n_seg,
                            const PhysicalParams& truth_params,
                            const DiracMeasure& truth_mu, const SimSpec& spec,
                            const NoiseSpec& noise, std::uint64_t seed);

}  // namespace leakloc
