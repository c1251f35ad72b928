#include "leakloc/assembly.hpp"

#include <stdexcept>

namespace leakloc {

OperatorSet assemble_operators(const StructuredMesh& mesh) {
    const int n = mesh.n_nodes();
    using T = Eigen::Triplet<double>;
    std::vector<T> tm, tk, tc1, tc2;
    tm.reserve(9 * mesh.n_elements());
    tk.reserve(9 * mesh.n_elements());
    tc1.reserve(9 * mesh.n_elements());
    tc2.reserve(9 * mesh.n_elements());

    for (int e = 0; e < mesh.n_elements(); ++e) {
        const auto& el = mesh.elements[e];
        const double area = element_area(mesh, e);
        const auto grad = basis_gradients(mesh, e);
        for (int r = 0; r < 3; ++r) {
            for (int m = 0; m < 3; ++m) {
                tm.emplace_back(el[r], el[m], area / 12.0 * (r == m ? 2.0 : 1.0));
                tk.emplace_back(el[r], el[m], area * grad[r].dot(grad[m]));
                // int (e_d . grad phi_m) phi_r = grad_m[d] * area/3
                tc1.emplace_back(el[r], el[m], grad[m].x() * area / 3.0);
                tc2.emplace_back(el[r], el[m], grad[m].y() * area / 3.0);
            }
        }
    }

    OperatorSet ops;
    ops.M.resize(n, n);
    ops.K1.resize(n, n);
    ops.C1.resize(n, n);
    ops.C2.resize(n, n);
    ops.M.setFromTriplets(tm.begin(), tm.end());
    ops.K1.setFromTriplets(tk.begin(), tk.end());
    ops.C1.setFromTriplets(tc1.begin(), tc1.end());
    ops.C2.setFromTriplets(tc2.begin(), tc2.end());

    ops.M_lump = ops.M * Eigen::VectorXd::Ones(n);

    // 1-D mass on the Dirichlet edges: segments of length hy along x=0, x=Lx
    std::vector<T> tg;
    const double hy = mesh.hy();
    for (int ix : {0, mesh.nx - 1}) {
        for (int iy = 0; iy < mesh.ny - 1; ++iy) {
            const int a = mesh.node_index(ix, iy);
            const int b = mesh.node_index(ix, iy + 1);
            tg.emplace_back(a, a, hy / 3.0);
            tg.emplace_back(b, b, hy / 3.0);
            tg.emplace_back(a, b, hy / 6.0);
            tg.emplace_back(b, a, hy / 6.0);
        }
    }
    ops.M_gamma.resize(n, n);
    ops.M_gamma.setFromTriplets(tg.begin(), tg.end());
    return ops;
}

Eigen::VectorXd source_load(const StructuredMesh& mesh, const DiracMeasure& mu) {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(mesh.n_nodes());
    for (const auto& sp : mu.spikes) {
        const auto loc = locate_point(mesh, sp.pos.x(), sp.pos.y());
        for (const auto& [r, phi] : basis_eval(mesh, loc)) {
            f[r] += sp.rate * phi;
        }
    }
    return f;
}

Eigen::VectorXd source_load_with_boundary(const StructuredMesh& mesh, const OperatorSet& ops,
                                          const DiracMeasure& mu, const Eigen::VectorXd& g) {
    if (g.size() != mesh.n_nodes()) {
        throw std::invalid_argument("source_load_with_boundary: g has wrong size");
    }
    return source_load(mesh, mu) + ops.M_gamma * g;
}

SpMat apply_dirichlet(const SpMat& A, const std::vector<int>& nodes) {
    std::vector<char> is_bc(A.rows(), 0);
    for (int r : nodes) is_bc[r] = 1;
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(A.nonZeros());
    for (int r = 0; r < A.outerSize(); ++r) {
        if (is_bc[r]) {
            t.emplace_back(r, r, 1.0);
            continue;
        }
        for (SpMat::InnerIterator it(A, r); it; ++it) {
            t.emplace_back(r, it.col(), it.value());
        }
    }
    SpMat out(A.rows(), A.cols());
    out.setFromTriplets(t.begin(), t.end());
    return out;
}

Eigen::VectorXd apply_dirichlet(const Eigen::VectorXd& v, const std::vector<int>& nodes,
                                double value) {
    Eigen::VectorXd out = v;
    for (int r : nodes) out[r] = value;
    return out;
}

}  // namespace leakloc
