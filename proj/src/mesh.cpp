#include "leakloc/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace leakloc {

namespace {
constexpr double kBaryTol = 1e-12;
}

StructuredMesh build_mesh(int nx, int ny, double Lx, double Ly) {
    if (nx < 2 || ny < 2) {
        throw std::invalid_argument("build_mesh: need at least 2 nodes per axis");
    }
    if (!(Lx > 0.0) || !(Ly > 0.0)) {
        throw std::invalid_argument("build_mesh: extent sides must be positive");
    }
    StructuredMesh m;
    m.nx = nx;
    m.ny = ny;
    m.Lx = Lx;
    m.Ly = Ly;
    m.nodes.resize(nx * ny, 2);
    const double hx = Lx / (nx - 1);
    const double hy = Ly / (ny - 1);
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const int r = iy * nx + ix;
            m.nodes(r, 0) = ix * hx;
            m.nodes(r, 1) = iy * hy;
        }
    }
    m.elements.reserve(2 * (nx - 1) * (ny - 1));
    for (int iy = 0; iy < ny - 1; ++iy) {
        for (int ix = 0; ix < nx - 1; ++ix) {
            const int a = m.node_index(ix, iy);
            const int b = m.node_index(ix + 1, iy);
            const int c = m.node_index(ix + 1, iy + 1);
            const int d = m.node_index(ix, iy + 1);
            m.elements.push_back({a, b, d});  // below the diagonal b->d
            m.elements.push_back({b, c, d});  // above it
        }
    }
    for (int iy = 0; iy < ny; ++iy) {
        m.dirichlet_nodes.push_back(m.node_index(0, iy));
        m.dirichlet_nodes.push_back(m.node_index(nx - 1, iy));
    }
    std::sort(m.dirichlet_nodes.begin(), m.dirichlet_nodes.end());
    return m;
}

std::array<double, 3> barycentric(const StructuredMesh& mesh, int e, double px, double py) {
    const auto& el = mesh.elements[e];
    const double x1 = mesh.nodes(el[0], 0), y1 = mesh.nodes(el[0], 1);
    const double x2 = mesh.nodes(el[1], 0), y2 = mesh.nodes(el[1], 1);
    const double x3 = mesh.nodes(el[2], 0), y3 = mesh.nodes(el[2], 1);
    const double det = (x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1);
    const double l1 = ((x2 - px) * (y3 - py) - (x3 - px) * (y2 - py)) / det;
    const double l2 = ((x3 - px) * (y1 - py) - (x1 - px) * (y3 - py)) / det;
    return {l1, l2, 1.0 - l1 - l2};
}

double element_area(const StructuredMesh& mesh, int e) {
    const auto& el = mesh.elements[e];
    const double x1 = mesh.nodes(el[0], 0), y1 = mesh.nodes(el[0], 1);
    const double x2 = mesh.nodes(el[1], 0), y2 = mesh.nodes(el[1], 1);
    const double x3 = mesh.nodes(el[2], 0), y3 = mesh.nodes(el[2], 1);
    return 0.5 * ((x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1));
}

namespace {

bool bary_inside(const std::array<double, 3>& b, double tol) {
    return b[0] >= -tol && b[1] >= -tol && b[2] >= -tol;
}

// Candidate cells around a point, ordered so their elements come out in
// ascending element-index order (cell index = iy*(nx-1)+ix, lower triangle
// before upper). Points on grid lines belong to up to four cells.
std::vector<std::pair<int, int>> candidate_cells(const StructuredMesh& mesh, double px,
                                                 double py) {
    const int ncx = mesh.nx - 1;
    const int ncy = mesh.ny - 1;
    auto clamp_cell = [](int i, int n) { return std::min(std::max(i, 0), n - 1); };
    const int ix0 = clamp_cell(static_cast<int>(std::floor(px / mesh.hx())), ncx);
    const int iy0 = clamp_cell(static_cast<int>(std::floor(py / mesh.hy())), ncy);
    std::vector<std::pair<int, int>> cells;
    for (int iy = std::max(0, iy0 - 1); iy <= std::min(ncy - 1, iy0 + 1); ++iy) {
        for (int ix = std::max(0, ix0 - 1); ix <= std::min(ncx - 1, ix0 + 1); ++ix) {
            cells.emplace_back(ix, iy);
        }
    }
    return cells;  // already ascending in iy, then ix
}

}  // namespace

PointLocation locate_point(const StructuredMesh& mesh, double px, double py) {
    if (!mesh.contains(px, py)) {
        throw std::domain_error("locate_point: point outside the domain");
    }
    for (const auto& [ix, iy] : candidate_cells(mesh, px, py)) {
        const int cell = iy * (mesh.nx - 1) + ix;
        for (int half = 0; half < 2; ++half) {
            const int e = 2 * cell + half;
            auto b = barycentric(mesh, e, px, py);
            if (bary_inside(b, kBaryTol)) {
                for (double& v : b) v = std::max(v, 0.0);
                const double s = b[0] + b[1] + b[2];
                for (double& v : b) v /= s;
                return {e, b};
            }
        }
    }
    throw std::domain_error("locate_point: no containing element (degenerate input?)");
}

std::array<std::pair<int, double>, 3> basis_eval(const StructuredMesh& mesh,
                                                 const PointLocation& loc) {
    const auto& el = mesh.elements[loc.element];
    return {std::pair{el[0], loc.bary[0]}, std::pair{el[1], loc.bary[1]},
            std::pair{el[2], loc.bary[2]}};
}

std::array<Eigen::Vector2d, 3> basis_gradients(const StructuredMesh& mesh, int e) {
    const auto& el = mesh.elements[e];
    const double x1 = mesh.nodes(el[0], 0), y1 = mesh.nodes(el[0], 1);
    const double x2 = mesh.nodes(el[1], 0), y2 = mesh.nodes(el[1], 1);
    const double x3 = mesh.nodes(el[2], 0), y3 = mesh.nodes(el[2], 1);
    const double det = (x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1);
    return {Eigen::Vector2d{(y2 - y3) / det, (x3 - x2) / det},
            Eigen::Vector2d{(y3 - y1) / det, (x1 - x3) / det},
            Eigen::Vector2d{(y1 - y2) / det, (x2 - x1) / det}};
}

std::vector<int> containing_elements(const StructuredMesh& mesh, double px, double py) {
    std::vector<int> found;
    for (const auto& [ix, iy] : candidate_cells(mesh, px, py)) {
        const int cell = iy * (mesh.nx - 1) + ix;
        for (int half = 0; half < 2; ++half) {
            const int e = 2 * cell + half;
            if (bary_inside(barycentric(mesh, e, px, py), kBaryTol)) {
                found.push_back(e);
            }
        }
    }
    return found;
}

}  // namespace leakloc
