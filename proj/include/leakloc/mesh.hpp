#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace leakloc {

// Uniform triangulation of [0,Lx]x[0,Ly] with nx*ny nodes. Every grid cell is
// split along its lower-right -> upper-left diagonal into two triangles, both
// oriented counterclockwise. (The anti-diagonal split keeps beams parallel to
// y=x transversal to the element edges, which the observation quadrature
// needs.) Node r = iy*nx + ix; cell (ix,iy) owns elements 2*(iy*(nx-1)+ix)
// (lower left) and +1 (upper right). Dirichlet nodes are the left/right edges
// (x = 0 and x = Lx); the top/bottom edges are the no-flux boundary.
struct StructuredMesh {
    int nx = 0;
    int ny = 0;
    double Lx = 0.0;
    double Ly = 0.0;
    Eigen::Matrix<double, Eigen::Dynamic, 2> nodes;
    std::vector<std::array<int, 3>> elements;
    std::vector<int> dirichlet_nodes;

    int n_nodes() const { return nx * ny; }
    int n_elements() const { return static_cast<int>(elements.size()); }
    double hx() const { return Lx / (nx - 1); }
    double hy() const { return Ly / (ny - 1); }
    int node_index(int ix, int iy) const { return iy * nx + ix; }

    bool contains(double px, double py, double tol = 0.0) const {
        return px >= -tol && px <= Lx + tol && py >= -tol && py <= Ly + tol;
    }
};

struct PointLocation {
    int element = -1;
    std::array<double, 3> bary{};  // nonnegative, sums to 1
};

StructuredMesh build_mesh(int nx, int ny, double Lx, double Ly);

// O(1) lookup via grid arithmetic. Points on shared edges resolve to the
// lowest containing element index. Throws std::domain_error outside the
// closed extent.
PointLocation locate_point(const StructuredMesh& mesh, double px, double py);

// Barycentric coordinates of p w.r.t. element e, unclamped.
std::array<double, 3> barycentric(const StructuredMesh& mesh, int e, double px, double py);

// The three (node index, basis value) pairs at a located point.
std::array<std::pair<int, double>, 3> basis_eval(const StructuredMesh& mesh,
                                                 const PointLocation& loc);

// Constant gradients of the three vertex basis functions on element e,
// ordered like the element's vertex list.
std::array<Eigen::Vector2d, 3> basis_gradients(const StructuredMesh& mesh, int e);

// All elements whose closure contains p (barycentric tolerance ~1e-12),
// ascending element index. Used to average piecewise-constant gradients at
// points that sit on element edges or vertices.
std::vector<int> containing_elements(const StructuredMesh& mesh, double px, double py);

double element_area(const StructuredMesh& mesh, int e);

}  // namespace leakloc
