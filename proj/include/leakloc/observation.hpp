#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "leakloc/assembly.hpp"
#include "leakloc/mesh.hpp"

namespace leakloc {

struct LaserConfig {
    std::vector<Eigen::Vector2d> sources;
    int mirrors_per_edge = 10;
    int n_seg = 200;
};

struct Beam {
    Eigen::Vector2d origin;
    Eigen::Vector2d target;
    double length = 0.0;
};

// One beam per (laser, mirror) pair. Mirrors sit on each edge at fraction
// i/(mirrors_per_edge+1) of the edge, i = 1..mirrors_per_edge. Ordering:
// lasers outer, edges in the order bottom, top, left, right, mirror index
// inner.
std::vector<Beam> enumerate_beams(const LaserConfig& config, double Lx, double Ly);

// Sparse line-integral matrix: each beam is cut into n_seg equal segments,
// each segment midpoint is located in the mesh, and the segment length is
// deposited in equal thirds onto the containing element's nodes. Row sums
// therefore equal the beam lengths exactly.
SpMat assemble_observation(const StructuredMesh& mesh, const std::vector<Beam>& beams,
                           int n_seg);

// Per-beam line integrals of the coarse trajectory at the observation times
// t_0 .. t_{N_T-1}: column i of the result is A * u^i. The trajectory matrix
// holds u^0..u^{N_T} in its columns; the final state is not observed.
Eigen::MatrixXd observe(const SpMat& A, const Eigen::MatrixXd& coarse_states);

// Plain-text geometry dump: index, origin, target, length per line.
std::string format_beam_table(const std::vector<Beam>& beams);

}  // namespace leakloc
