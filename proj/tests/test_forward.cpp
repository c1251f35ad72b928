#include "leakloc/forward.hpp"

#include <cmath>

#include "doctest.h"

using namespace leakloc;

TEST_CASE("cfl_substeps on the experiment grid") {
    auto m = build_mesh(32, 32, 0.5, 0.5);

    PhysicalParams diffusive{0.01, {0.0, 0.0}};
    // dt_max = 0.25 * h^2/k0 ~ 6.50e-3 -> 4 sub-steps for delta = 0.02
    CHECK(cfl_substeps(m, diffusive, 0.02, 0.25) == 4);

    PhysicalParams mild{0.001, {0.0, 0.0}};
    CHECK(cfl_substeps(m, mild, 0.02, 0.25) == 1);

    // delta already below the bound
    CHECK(cfl_substeps(m, diffusive, 1e-4, 0.25) == 1);

    // convection-limited case: bound h/|c|_inf
    PhysicalParams windy{0.001, {1.0, 0.2}};
    const double h = 0.5 / 31;
    const int expected = static_cast<int>(std::ceil(0.02 / (0.25 * h)));
    CHECK(cfl_substeps(m, windy, 0.02, 0.25) == expected);
}

TEST_CASE("zero source and zero initial state stay zero") {
    auto m = build_mesh(16, 16, 0.5, 0.5);
    auto ops = assemble_operators(m);
    SimSpec spec{0.2, 10, 0.25, 2};
    auto traj = solve_forward(m, ops, {0.01, {0.2, -0.1}}, DiracMeasure{},
                              Eigen::VectorXd::Zero(m.n_nodes()), spec);
    CHECK(traj.coarse.norm() == 0.0);
    CHECK(traj.min_value == 0.0);
}

TEST_CASE("forward solve is linear in the measure") {
    auto m = build_mesh(16, 16, 0.5, 0.5);
    auto ops = assemble_operators(m);
    PhysicalParams p{0.01, {0.3, 0.1}};
    SimSpec spec{0.2, 10, 0.25, 2};
    const Eigen::VectorXd u0 = Eigen::VectorXd::Zero(m.n_nodes());

    DiracMeasure a{{{{0.12, 0.31}, 0.08}}};
    DiracMeasure b{{{{0.36, 0.2}, 0.05}}};
    DiracMeasure both{{a.spikes[0], b.spikes[0]}};
    auto ta = solve_forward(m, ops, p, a, u0, spec);
    auto tb = solve_forward(m, ops, p, b, u0, spec);
    auto tboth = solve_forward(m, ops, p, both, u0, spec);
    const double err = (tboth.coarse - ta.coarse - tb.coarse).norm();
    CHECK(err <= 1e-12 * tboth.coarse.norm());
}

TEST_CASE("dirichlet nodes stay exactly zero along the trajectory") {
    auto m = build_mesh(16, 16, 0.5, 0.5);
    auto ops = assemble_operators(m);
    SimSpec spec{0.2, 10, 0.25, 2};
    DiracMeasure mu{{{{0.05, 0.25}, 0.1}}};  // near the left Dirichlet edge
    Eigen::VectorXd u0 = Eigen::VectorXd::Constant(m.n_nodes(), 0.3);
    auto traj = solve_forward(m, ops, {0.01, {-0.4, 0.0}}, mu, u0, spec, true);
    for (int r : m.dirichlet_nodes) {
        CHECK(traj.coarse.row(r).cwiseAbs().maxCoeff() == 0.0);
        CHECK(traj.substates.row(r).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("discrete positivity under the stability bound") {
    auto m = build_mesh(32, 32, 0.5, 0.5);
    auto ops = assemble_operators(m);
    DiracMeasure mu{{{{0.23, 0.31}, 0.08}}};
    const Eigen::VectorXd u0 = Eigen::VectorXd::Zero(m.n_nodes());

    SUBCASE("pure diffusion never undershoots") {
        PhysicalParams p{0.01, {0.0, 0.0}};
        SimSpec spec{1.0, 50, 0.25, 0};
        spec.n_sub = cfl_substeps(m, p, spec.coarse_dt(), spec.cfl_safety);
        auto traj = solve_forward(m, ops, p, mu, u0, spec);
        CHECK(traj.min_value >= -1e-10);
    }

    // centered convection is not sign-preserving; the undershoot near the
    // source is monitored and must stay small against the solution scale
    SUBCASE("convective undershoot stays small") {
        PhysicalParams p{0.01, {0.433, 0.25}};
        SimSpec spec{1.0, 50, 0.25, 0};
        spec.n_sub = cfl_substeps(m, p, spec.coarse_dt(), spec.cfl_safety);
        auto traj = solve_forward(m, ops, p, mu, u0, spec);
        CHECK(traj.min_value >= -1e-3 * traj.coarse.maxCoeff());

        SimSpec fine{1.0, 50, 0.25, 16 * spec.n_sub};
        auto refined = solve_forward(m, ops, p, mu, u0, fine);
        CHECK(refined.min_value > 10.0 * traj.min_value);  // both negative
    }
}

TEST_CASE("first-order convergence in the sub-step size") {
    auto m = build_mesh(16, 16, 0.5, 0.5);
    auto ops = assemble_operators(m);
    PhysicalParams p{0.01, {0.2, 0.1}};
    DiracMeasure mu{{{{0.22, 0.28}, 0.1}}};
    const Eigen::VectorXd u0 = Eigen::VectorXd::Zero(m.n_nodes());

    auto final_state = [&](int n_sub) {
        SimSpec spec{0.2, 10, 0.25, n_sub};
        return solve_forward(m, ops, p, mu, u0, spec).coarse.col(10).eval();
    };
    const Eigen::VectorXd u2 = final_state(2);
    const Eigen::VectorXd u4 = final_state(4);
    const Eigen::VectorXd u8 = final_state(8);
    const double ratio = (u2 - u4).norm() / (u4 - u8).norm();
    CHECK(ratio >= 1.7);
    CHECK(ratio <= 2.3);
}

TEST_CASE("unstable step count reports divergence") {
    auto m = build_mesh(32, 32, 0.5, 0.5);
    auto ops = assemble_operators(m);
    PhysicalParams p{1.0, {0.0, 0.0}};  // needs ~300 sub-steps at delta = 0.02
    SimSpec spec{3.0, 150, 0.25, 1};    // long enough for the blow-up to overflow
    DiracMeasure mu{{{{0.25, 0.25}, 0.1}}};
    CHECK_THROWS_AS(
        solve_forward(m, ops, p, mu, Eigen::VectorXd::Zero(m.n_nodes()), spec),
        SolverFailure);
}
