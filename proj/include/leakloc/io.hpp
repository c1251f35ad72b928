#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "leakloc/assembly.hpp"
#include "leakloc/mesh.hpp"
#include "leakloc/optimizer.hpp"

namespace leakloc {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Doubles are printed with 17 significant digits throughout so every file
// parses back to the exact values written.

// header `iter,value,cpu_time,n_spikes,inner_iters,k0,c1,c2,slide,merged`
std::string format_iteration_log(const std::vector<IterationRecord>& log);

// header `x,y,rate`; spikes below floor_rel * max rate are suppressed
std::string format_sources_csv(const DiracMeasure& mu, double floor_rel);

// the reported table under the same floor, for metrics
DiracMeasure floored_measure(const DiracMeasure& mu, double floor_rel);

// header `beam,obs0,...`; one row per beam, one column per observation time
std::string format_data_csv(const Eigen::MatrixXd& b);

// inverse of format_sources_csv (no floor applied on read)
DiracMeasure parse_sources_csv(const std::string& text);

// Nodal field snapshot: line 1 "nx ny Lx Ly t", then ny rows of nx values
// (row-major, bottom row first).
std::string format_snapshot(const StructuredMesh& mesh, const Eigen::VectorXd& field,
                            double t);

struct Snapshot {
    int nx = 0;
    int ny = 0;
    double Lx = 0.0;
    double Ly = 0.0;
    double t = 0.0;
    Eigen::VectorXd values;
};

Snapshot parse_snapshot(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace leakloc
