#pragma once

#include <string>

#include "leakloc/config.hpp"
#include "leakloc/metrics.hpp"

namespace leakloc {

// Everything a run leaves on disk, nested under config.out_dir:
//   config_echo.json  fully resolved configuration
//   beams.txt         beam geometry table
//   data.csv          simulated measurements the reconstruction saw
//   log.csv           one row per outer iteration
//   sources.csv       final source table (reporting floor applied)
//   metrics.csv       recovery metrics against the configured truth
//   truth_t*.txt      truth concentration snapshots
//   recon_t*.txt      reconstructed concentration snapshots
// Solver failures leave error.txt instead of the result files.

struct RunOutcome {
    int exit_code = 0;  // 0 ok, 2 solver failure
    RecoveryMetrics metrics;
    DiracMeasure reported;  // floored source table
    PhysicalParams params;  // final (k, c)
    double final_objective = 0.0;
};

// Fractions of T at which concentration snapshots are written.
inline constexpr double kSnapshotFractions[] = {0.0, 0.2, 0.5, 0.7, 1.0};

// Synthesize data, run the configured optimizer variant, write all artifacts.
RunOutcome run_experiment(const ExperimentConfig& config);

// Data-generation half only: config echo, beams, data, truth snapshots.
int simulate_experiment(const ExperimentConfig& config);

}  // namespace leakloc
