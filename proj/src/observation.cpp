#include "leakloc/observation.hpp"

#include <cstdio>
#include <stdexcept>

namespace leakloc {

std::vector<Beam> enumerate_beams(const LaserConfig& config, double Lx, double Ly) {
    const int m = config.mirrors_per_edge;
    std::vector<Eigen::Vector2d> mirrors;
    mirrors.reserve(4 * m);
    for (int i = 1; i <= m; ++i) mirrors.emplace_back(Lx * i / (m + 1), 0.0);  // bottom
    for (int i = 1; i <= m; ++i) mirrors.emplace_back(Lx * i / (m + 1), Ly);   // top
    for (int i = 1; i <= m; ++i) mirrors.emplace_back(0.0, Ly * i / (m + 1));  // left
    for (int i = 1; i <= m; ++i) mirrors.emplace_back(Lx, Ly * i / (m + 1));   // right

    std::vector<Beam> beams;
    beams.reserve(config.sources.size() * mirrors.size());
    for (const auto& src : config.sources) {
        for (const auto& mir : mirrors) {
            beams.push_back({src, mir, (mir - src).norm()});
        }
    }
    return beams;
}

SpMat assemble_observation(const StructuredMesh& mesh, const std::vector<Beam>& beams,
                           int n_seg) {
    if (n_seg < 1) throw std::invalid_argument("assemble_observation: n_seg must be >= 1");
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(beams.size() * n_seg * 3);
    for (size_t ell = 0; ell < beams.size(); ++ell) {
        const Beam& b = beams[ell];
        const double lp = b.length / n_seg;
        for (int p = 0; p < n_seg; ++p) {
            const double t = (p + 0.5) / n_seg;
            const Eigen::Vector2d mid = b.origin + t * (b.target - b.origin);
            const auto loc = locate_point(mesh, mid.x(), mid.y());
            for (int node : mesh.elements[loc.element]) {
                trip.emplace_back(static_cast<int>(ell), node, lp / 3.0);
            }
        }
    }
    SpMat A(static_cast<int>(beams.size()), mesh.n_nodes());
    A.setFromTriplets(trip.begin(), trip.end());
    return A;
}

Eigen::MatrixXd observe(const SpMat& A, const Eigen::MatrixXd& coarse_states) {
    if (coarse_states.rows() != A.cols()) {
        throw std::invalid_argument("observe: node count mismatch");
    }
    const Eigen::Index nt = coarse_states.cols() - 1;
    return A * coarse_states.leftCols(nt);
}

std::string format_beam_table(const std::vector<Beam>& beams) {
    std::string out = "# beam origin_x origin_y target_x target_y length\n";
    char line[160];
    for (size_t i = 0; i < beams.size(); ++i) {
        const Beam& b = beams[i];
        std::snprintf(line, sizeof(line), "%zu %.17g %.17g %.17g %.17g %.17g\n", i,
                      b.origin.x(), b.origin.y(), b.target.x(), b.target.y(), b.length);
        out += line;
    }
    return out;
}

}  // namespace leakloc
