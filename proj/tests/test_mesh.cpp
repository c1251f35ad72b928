#include "leakloc/mesh.hpp"

#include <cmath>
#include <random>

#include "doctest.h"

using namespace leakloc;

namespace {

// Independent oracle: scan every element and return the lowest index whose
// closure contains the point.
int brute_force_locate(const StructuredMesh& m, double px, double py) {
    for (int e = 0; e < m.n_elements(); ++e) {
        auto b = barycentric(m, e, px, py);
        if (b[0] >= -1e-12 && b[1] >= -1e-12 && b[2] >= -1e-12) return e;
    }
    return -1;
}

}  // namespace

TEST_CASE("build_mesh node and element counts") {
    auto m = build_mesh(32, 32, 0.5, 0.5);
    CHECK(m.n_nodes() == 1024);
    CHECK(m.n_elements() == 1922);

    auto tiny = build_mesh(2, 2, 1.0, 1.0);
    CHECK(tiny.n_nodes() == 4);
    CHECK(tiny.n_elements() == 2);
}

TEST_CASE("build_mesh rejects bad input") {
    CHECK_THROWS(build_mesh(1, 2, 1.0, 1.0));
    CHECK_THROWS(build_mesh(2, 1, 1.0, 1.0));
    CHECK_THROWS(build_mesh(4, 4, 0.0, 1.0));
    CHECK_THROWS(build_mesh(4, 4, 1.0, -2.0));
}

TEST_CASE("element areas are positive and tile the extent") {
    auto m = build_mesh(32, 32, 0.5, 0.5);
    double total = 0.0;
    for (int e = 0; e < m.n_elements(); ++e) {
        const double a = element_area(m, e);
        CHECK(a > 0.0);
        total += a;
    }
    CHECK(std::abs(total - 0.25) <= 1e-12 * 0.25);
}

TEST_CASE("dirichlet nodes are exactly the left/right edges") {
    auto m = build_mesh(7, 5, 0.5, 0.5);
    CHECK(m.dirichlet_nodes.size() == 2u * 5u);
    for (int r : m.dirichlet_nodes) {
        const double x = m.nodes(r, 0);
        CHECK((x == 0.0 || x == m.Lx));
    }
    int count = 0;
    for (int r = 0; r < m.n_nodes(); ++r) {
        if (m.nodes(r, 0) == 0.0 || m.nodes(r, 0) == m.Lx) ++count;
    }
    CHECK(count == static_cast<int>(m.dirichlet_nodes.size()));
}

TEST_CASE("locate_point at a cell corner and a centroid") {
    auto m = build_mesh(32, 32, 0.5, 0.5);

    auto loc = locate_point(m, 0.0, 0.0);
    CHECK(loc.element == 0);
    CHECK(loc.bary[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(loc.bary[1] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(loc.bary[2] == doctest::Approx(0.0).epsilon(1e-14));

    const int e = 777;
    const auto& el = m.elements[e];
    const double cx = (m.nodes(el[0], 0) + m.nodes(el[1], 0) + m.nodes(el[2], 0)) / 3.0;
    const double cy = (m.nodes(el[0], 1) + m.nodes(el[1], 1) + m.nodes(el[2], 1)) / 3.0;
    auto cloc = locate_point(m, cx, cy);
    CHECK(cloc.element == e);
    for (double b : cloc.bary) CHECK(b == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("locate_point rejects points outside the domain") {
    auto m = build_mesh(8, 8, 0.5, 0.5);
    CHECK_THROWS_AS(locate_point(m, -0.01, 0.2), std::domain_error);
    CHECK_THROWS_AS(locate_point(m, 0.2, 0.51), std::domain_error);
}

TEST_CASE("locate_point matches brute-force scan on random interior points") {
    auto m = build_mesh(32, 32, 0.5, 0.5);
    std::mt19937 gen(42);
    std::uniform_real_distribution<double> dist(0.0, 0.5);
    for (int trial = 0; trial < 10000; ++trial) {
        const double px = dist(gen);
        const double py = dist(gen);
        auto loc = locate_point(m, px, py);
        CHECK(loc.element == brute_force_locate(m, px, py));
        // reconstruction within 1e-12 of the domain diameter
        const auto& el = m.elements[loc.element];
        double rx = 0.0, ry = 0.0;
        for (int k = 0; k < 3; ++k) {
            rx += loc.bary[k] * m.nodes(el[k], 0);
            ry += loc.bary[k] * m.nodes(el[k], 1);
        }
        const double diam = std::hypot(m.Lx, m.Ly);
        CHECK(std::hypot(rx - px, ry - py) <= 1e-12 * diam);
    }
}

TEST_CASE("locate_point tie-breaks on grid lines like the brute-force scan") {
    auto m = build_mesh(9, 9, 0.5, 0.5);
    const double h = m.hx();
    for (int i = 0; i <= 8; ++i) {
        for (int j = 0; j <= 8; ++j) {
            // grid vertices
            CHECK(locate_point(m, i * h, j * h).element ==
                  brute_force_locate(m, i * h, j * h));
        }
        // points on vertical/horizontal grid lines and cell diagonals
        CHECK(locate_point(m, i * h, 0.237).element == brute_force_locate(m, i * h, 0.237));
        CHECK(locate_point(m, 0.237, i * h).element == brute_force_locate(m, 0.237, i * h));
    }
    CHECK(locate_point(m, 0.3, 0.3).element == brute_force_locate(m, 0.3, 0.3));
}

TEST_CASE("basis_eval: vertex, centroid, partition of unity") {
    auto m = build_mesh(32, 32, 0.5, 0.5);

    // vertex point: weight 1 on that node, two zeros
    const int node = m.node_index(5, 7);
    auto loc = locate_point(m, m.nodes(node, 0), m.nodes(node, 1));
    auto be = basis_eval(m, loc);
    double at_node = 0.0, others = 0.0;
    for (const auto& [r, v] : be) (r == node ? at_node : others) += v;
    CHECK(at_node == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(others == doctest::Approx(0.0).epsilon(1e-14));

    std::mt19937 gen(7);
    std::uniform_real_distribution<double> dist(0.0, 0.5);
    for (int trial = 0; trial < 1000; ++trial) {
        auto l = locate_point(m, dist(gen), dist(gen));
        auto b = basis_eval(m, l);
        const double s = b[0].second + b[1].second + b[2].second;
        CHECK(std::abs(s - 1.0) <= 1e-14);
    }
}

TEST_CASE("basis_gradients reproduce linear functions exactly") {
    auto m = build_mesh(6, 9, 0.5, 0.4);
    // nodal interpolant of f(x,y) = 3x - 2y + 1 has gradient (3,-2) on every element
    for (int e : {0, 1, 17, m.n_elements() - 1}) {
        auto grads = basis_gradients(m, e);
        const auto& el = m.elements[e];
        Eigen::Vector2d g = Eigen::Vector2d::Zero();
        for (int k = 0; k < 3; ++k) {
            const double f = 3.0 * m.nodes(el[k], 0) - 2.0 * m.nodes(el[k], 1) + 1.0;
            g += f * grads[k];
        }
        CHECK(g.x() == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(g.y() == doctest::Approx(-2.0).epsilon(1e-12));
    }
}

TEST_CASE("containing_elements finds all neighbors of a vertex") {
    auto m = build_mesh(9, 9, 0.5, 0.5);
    // interior vertex: six incident triangles with this diagonal pattern
    const int node = m.node_index(4, 4);
    auto elems = containing_elements(m, m.nodes(node, 0), m.nodes(node, 1));
    CHECK(elems.size() == 6);
    // strict interior point: exactly one element
    auto single = containing_elements(m, 0.2632, 0.1871);
    CHECK(single.size() == 1);
    CHECK(single[0] == brute_force_locate(m, 0.2632, 0.1871));
}
