#include "leakloc/adjoint.hpp"

#include <cmath>
#include <limits>

namespace leakloc {

ObjectiveParts objective(const SpMat& A, const Eigen::MatrixXd& coarse_states,
                         const Eigen::MatrixXd& b, const DiracMeasure& mu,
                         const PhysicalParams& params, const RegConfig& reg) {
    ObjectiveParts parts;
    const Eigen::MatrixXd residual = observe(A, coarse_states) - b;
    parts.misfit = 0.5 * residual.squaredNorm() / double(residual.size());
    parts.radon = reg.alpha * mu.radon_norm();
    const double dk = params.k0 - reg.k_ref;
    parts.kc_penalty = 0.5 * reg.k_weight * dk * dk;
    for (int i = 0; i < 2; ++i) {
        const double dc = params.c[i] - reg.c_ref[i];
        parts.kc_penalty += 0.5 * reg.c_weight * dc * dc;
    }
    parts.feasible = params.k0 >= reg.k_min && params.k0 <= reg.k_max;
    for (int i = 0; i < 2; ++i) {
        parts.feasible = parts.feasible && params.c[i] >= reg.c_min && params.c[i] <= reg.c_max;
    }
    for (const auto& sp : mu.spikes) parts.feasible = parts.feasible && sp.rate >= 0.0;
    parts.total = parts.feasible
                      ? parts.misfit + parts.radon + parts.kc_penalty
                      : std::numeric_limits<double>::infinity();
    return parts;
}

namespace {

// Shared backward recursion. w_{j} = (I - dt K^T M^{-1}) S w_{j+1} + injection,
// with injection A^T y_i at j = i*n_sub. The callback sees (j, y_j) for
// y_j = M^{-1} S w_j, j = N..1, before w_{j-1} is formed.
template <typename Callback>
void backward_sweep(const StructuredMesh& mesh, const OperatorSet& ops,
                    const PhysicalParams& params, const SpMat& A,
                    const Eigen::MatrixXd& residual, const SimSpec& spec, Callback&& cb) {
    const int n = mesh.n_nodes();
    const SpMat KT = SpMat(ops.combined(params.k0, params.c.x(), params.c.y()).transpose());
    const Eigen::VectorXd minv = ops.M_lump.cwiseInverse();
    const double dt = spec.sub_dt();
    const int total = spec.total_substeps();

    // A^T residual for every observation time, one sparse-dense product
    const Eigen::MatrixXd inj = A.transpose() * residual;

    Eigen::VectorXd w = Eigen::VectorXd::Zero(n);  // w_N = 0
    Eigen::VectorXd t(n), y(n);
    for (int j = total - 1; j >= 0; --j) {
        // y_{j+1} from the current w = w_{j+1}
        t = w;
        for (int r : mesh.dirichlet_nodes) t[r] = 0.0;
        y = minv.cwiseProduct(t);
        cb(j + 1, y);
        if (j == 0) break;  // w_0 pairs with the fixed initial state only
        w = t - dt * (KT * y);
        if (j % spec.n_sub == 0) {
            w += inj.col(j / spec.n_sub);
        }
    }
}

}  // namespace

Eigen::MatrixXd solve_adjoint(const StructuredMesh& mesh, const OperatorSet& ops,
                              const PhysicalParams& params, const SpMat& A,
                              const Eigen::MatrixXd& residual, const SimSpec& spec) {
    const int n = mesh.n_nodes();
    const SpMat KT = SpMat(ops.combined(params.k0, params.c.x(), params.c.y()).transpose());
    const Eigen::VectorXd minv = ops.M_lump.cwiseInverse();
    const double dt = spec.sub_dt();
    const int total = spec.total_substeps();
    const Eigen::MatrixXd inj = A.transpose() * residual;

    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, total + 1);
    Eigen::VectorXd t(n);
    for (int j = total - 1; j >= 0; --j) {
        t = W.col(j + 1);
        for (int r : mesh.dirichlet_nodes) t[r] = 0.0;
        Eigen::VectorXd w = t - dt * (KT * minv.cwiseProduct(t));
        if (j % spec.n_sub == 0) w += inj.col(j / spec.n_sub);
        W.col(j) = w;
        if (!w.allFinite()) {
            throw SolverFailure("adjoint solve diverged at sub-step " + std::to_string(j));
        }
    }
    return W;
}

Eigen::VectorXd adjoint_load_map(const StructuredMesh& mesh, const OperatorSet& ops,
                                 const PhysicalParams& params, const SpMat& A,
                                 const Eigen::MatrixXd& y, const SimSpec& spec) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(mesh.n_nodes());
    backward_sweep(mesh, ops, params, A, y, spec,
                   [&](int, const Eigen::VectorXd& yj) { v += yj; });
    return spec.sub_dt() * v;
}

GradientBundle gradient(const StructuredMesh& mesh, const OperatorSet& ops,
                        const PhysicalParams& params, const DiracMeasure& mu,
                        const StateTrajectory& traj, const SpMat& A,
                        const Eigen::MatrixXd& residual, const SimSpec& spec) {
    if (!traj.has_substates()) {
        throw std::invalid_argument("gradient: needs a trajectory recorded with substates");
    }
    GradientBundle g;
    Eigen::VectorXd v_acc = Eigen::VectorXd::Zero(mesh.n_nodes());
    double gk_acc = 0.0;
    Eigen::Vector2d gc_acc = Eigen::Vector2d::Zero();
    backward_sweep(mesh, ops, params, A, residual, spec,
                   [&](int j, const Eigen::VectorXd& yj) {
                       v_acc += yj;
                       const auto u = traj.substates.col(j - 1);
                       gk_acc += yj.dot(ops.K1 * u);
                       gc_acc.x() += yj.dot(ops.C1 * u);
                       gc_acc.y() += yj.dot(ops.C2 * u);
                   });
    const double dt = spec.sub_dt();
    g.v_field = dt * v_acc;
    g.g_k = -dt * gk_acc;
    g.g_c = -dt * gc_acc;
    g.spike_v.reserve(mu.spikes.size());
    g.spike_grad.reserve(mu.spikes.size());
    for (const auto& sp : mu.spikes) {
        g.spike_v.push_back(eval_field(mesh, g.v_field, sp.pos.x(), sp.pos.y()));
        g.spike_grad.push_back(eval_field_gradient(mesh, g.v_field, sp.pos.x(), sp.pos.y()));
    }
    return g;
}

double eval_field(const StructuredMesh& mesh, const Eigen::VectorXd& field, double px,
                  double py) {
    const auto loc = locate_point(mesh, px, py);
    double value = 0.0;
    for (const auto& [r, phi] : basis_eval(mesh, loc)) value += phi * field[r];
    return value;
}

Eigen::Vector2d eval_field_gradient(const StructuredMesh& mesh, const Eigen::VectorXd& field,
                                    double px, double py) {
    const auto elems = containing_elements(mesh, px, py);
    Eigen::Vector2d grad = Eigen::Vector2d::Zero();
    for (int e : elems) {
        const auto g = basis_gradients(mesh, e);
        const auto& el = mesh.elements[e];
        for (int k = 0; k < 3; ++k) grad += field[el[k]] * g[k];
    }
    return grad / static_cast<double>(elems.size());
}

}  // namespace leakloc
