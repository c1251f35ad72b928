#pragma once

#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "leakloc/mesh.hpp"

namespace leakloc {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// One weighted point source: rate * delta at pos.
struct Spike {
    Eigen::Vector2d pos;
    double rate = 0.0;
};

struct DiracMeasure {
    std::vector<Spike> spikes;

    double radon_norm() const {
        double s = 0.0;
        for (const auto& sp : spikes) s += sp.rate;
        return s;
    }
};

// All matrices of the linear discretization. The time-stepping operator for
// parameters (k0, c) is K(x) = k0*K1 + c1*C1 + c2*C2; M_lump holds the row
// sums of M so explicit updates are diagonal solves. M_gamma is the boundary
// mass on the Dirichlet edges, used only when the boundary value g is
// nonzero.
struct OperatorSet {
    SpMat M;
    SpMat K1;
    SpMat C1;
    SpMat C2;
    SpMat M_gamma;
    Eigen::VectorXd M_lump;

    SpMat combined(double k0, double c1, double c2) const {
        SpMat K = k0 * K1;
        K += c1 * C1;
        K += c2 * C2;
        return K;
    }
};

OperatorSet assemble_operators(const StructuredMesh& mesh);

// Load vector with entries <mu, phi_r>: each spike deposits its rate onto the
// three basis functions of its containing element.
Eigen::VectorXd source_load(const StructuredMesh& mesh, const DiracMeasure& mu);

// Full right-hand side <mu, phi_r> + M_gamma * g for nonzero Dirichlet data g
// (nodal vector; only its Dirichlet-edge entries matter).
Eigen::VectorXd source_load_with_boundary(const StructuredMesh& mesh, const OperatorSet& ops,
                                          const DiracMeasure& mu, const Eigen::VectorXd& g);

// Replace the given rows by identity rows (matrices) or set the given entries
// to value (vectors).
SpMat apply_dirichlet(const SpMat& A, const std::vector<int>& nodes);
Eigen::VectorXd apply_dirichlet(const Eigen::VectorXd& v, const std::vector<int>& nodes,
                                double value = 0.0);

}  // namespace leakloc
