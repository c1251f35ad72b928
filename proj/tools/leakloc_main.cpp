#include <cstdio>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "leakloc/config.hpp"
#include "leakloc/io.hpp"
#include "leakloc/metrics.hpp"
#include "leakloc/run.hpp"

namespace {

using namespace leakloc;

// --config accepts a built-in preset name or a path to a JSON file
ExperimentConfig resolve_config(const std::string& spec) {
    if (spec.empty()) return preset("experiment1");
    if (spec == "experiment1" || spec == "experiment2") return preset(spec);
    return load_config(spec);
}

struct CommonOpts {
    std::string config;
    std::string variant;
    std::string out;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool out_set = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config,
                    "Config file path, or a preset name (experiment1, experiment2)");
    cmd->add_option("--variant", o.variant, "Optimizer variant: basic or sliding")
        ->check(CLI::IsMember({"basic", "sliding"}));
    cmd->add_option("--seed", o.seed, "Override the rng seed")
        ->each([&](const std::string&) { o.seed_set = true; });
    cmd->add_option("--out", o.out, "Override the output directory")
        ->each([&](const std::string&) { o.out_set = true; });
}

ExperimentConfig apply_overrides(const CommonOpts& o) {
    ExperimentConfig c = resolve_config(o.config);
    if (!o.variant.empty()) c.variant = o.variant == "basic" ? Variant::Basic : Variant::Sliding;
    if (o.seed_set) c.rng_seed = o.seed;
    if (o.out_set) c.out_dir = o.out;
    validate_config(c);
    return c;
}

int cmd_run(const CommonOpts& o) {
    ExperimentConfig c = apply_overrides(o);
    RunOutcome r = run_experiment(c);
    if (r.exit_code != 0) {
        std::fprintf(stderr, "solver failure, diagnostics in %s/error.txt\n",
                     c.out_dir.c_str());
        return r.exit_code;
    }
    std::printf("final objective %.6e, k0 %.6f, c (%.4f, %.4f)\n", r.final_objective,
                r.params.k0, r.params.c.x(), r.params.c.y());
    std::printf("%zu source(s) above the reporting floor:\n", r.reported.spikes.size());
    for (const auto& s : r.reported.spikes)
        std::printf("  (%.4f, %.4f) rate %.4e\n", s.pos.x(), s.pos.y(), s.rate);
    std::printf("artifacts in %s\n", c.out_dir.c_str());
    return 0;
}

int cmd_simulate(const CommonOpts& o) {
    ExperimentConfig c = apply_overrides(o);
    simulate_experiment(c);
    std::printf("data and truth snapshots in %s\n", c.out_dir.c_str());
    return 0;
}

int cmd_metrics(const CommonOpts& o, const std::string& sources_path) {
    ExperimentConfig c = apply_overrides(o);
    DiracMeasure reported = parse_sources_csv(read_text_file(sources_path));
    RecoveryMetrics m = compute_metrics(reported, c.truth.mu);
    const std::string csv = format_metrics_csv(m);
    if (o.out_set) {
        std::filesystem::create_directories(c.out_dir);
        write_text_file(c.out_dir + "/metrics.csv", csv);
        std::printf("metrics in %s/metrics.csv\n", c.out_dir.c_str());
    } else {
        std::fputs(csv.c_str(), stdout);
    }
    return 0;
}

// quick derivative self-test on the configured scene: adjoint pairing plus
// finite-difference checks of the parameter and weight gradients
int cmd_check(const CommonOpts& o) {
    ExperimentConfig c = apply_overrides(o);
    auto mesh = build_mesh(c.mesh.nx, c.mesh.ny, c.mesh.Lx, c.mesh.Ly);
    auto ops = assemble_operators(mesh);
    auto beams = enumerate_beams(c.lasers, c.mesh.Lx, c.mesh.Ly);
    auto A = assemble_observation(mesh, beams, c.lasers.n_seg);
    SimSpec spec = c.time;
    PhysicalParams p{c.truth.k, c.truth.c};
    spec.n_sub = std::max(spec.n_sub,
                          cfl_substeps(mesh, p, spec.coarse_dt(), spec.cfl_safety));
    const Eigen::VectorXd u0 = Eigen::VectorXd::Zero(mesh.n_nodes());
    DetRng rng(c.rng_seed);
    bool ok = true;

    for (int trial = 0; trial < 3; ++trial) {
        Eigen::VectorXd f(mesh.n_nodes());
        for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = rng.normal();
        Eigen::MatrixXd y(A.rows(), spec.N_T);
        for (Eigen::Index i = 0; i < y.rows(); ++i)
            for (Eigen::Index j = 0; j < y.cols(); ++j) y(i, j) = rng.normal();
        auto traj = solve_forward_load(mesh, ops, p, f, u0, spec);
        const double lhs = (observe(A, traj.coarse).array() * y.array()).sum();
        const double rhs = f.dot(adjoint_load_map(mesh, ops, p, A, y, spec));
        const double rel = std::abs(lhs - rhs) /
                           std::max({std::abs(lhs), std::abs(rhs), 1e-300});
        std::printf("adjoint pairing trial %d: relative gap %.3e %s\n", trial, rel,
                    rel <= 1e-10 ? "ok" : "FAIL");
        ok = ok && rel <= 1e-10;
    }

    DiracMeasure mu;
    mu.spikes = {{{0.33 * c.mesh.Lx, 0.61 * c.mesh.Ly}, 0.07},
                 {{0.72 * c.mesh.Lx, 0.28 * c.mesh.Ly}, 0.05}};
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(A.rows(), spec.N_T);
    auto eval = [&](const PhysicalParams& q, const DiracMeasure& mm) {
        auto traj = solve_forward(mesh, ops, q, mm, u0, spec);
        const Eigen::MatrixXd r = observe(A, traj.coarse) - b;
        return 0.5 * r.squaredNorm() / double(r.size());
    };
    auto traj = solve_forward(mesh, ops, p, mu, u0, spec, true);
    const Eigen::MatrixXd residual = (observe(A, traj.coarse) - b) / double(b.size());
    auto g = gradient(mesh, ops, p, mu, traj, A, residual, spec);

    const double hk = 1e-6 * std::max(1.0, std::abs(p.k0));
    PhysicalParams pp = p, pm = p;
    pp.k0 += hk;
    pm.k0 -= hk;
    const double fd_k = (eval(pp, mu) - eval(pm, mu)) / (2 * hk);
    const double rel_k = std::abs(fd_k - g.g_k) / std::max(std::abs(fd_k), 1e-300);
    std::printf("diffusion gradient: fd %.6e adjoint %.6e rel %.3e %s\n", fd_k, g.g_k,
                rel_k, rel_k <= 1e-6 ? "ok" : "FAIL");
    ok = ok && rel_k <= 1e-6;

    for (int i = 0; i < 2; ++i) {
        DiracMeasure mp = mu, mm = mu;
        const double hw = 1e-6;
        mp.spikes[i].rate += hw;
        mm.spikes[i].rate -= hw;
        const double fd_w = (eval(p, mp) - eval(p, mm)) / (2 * hw);
        const double rel_w =
            std::abs(fd_w - g.spike_v[i]) / std::max(std::abs(fd_w), 1e-300);
        std::printf("weight %d gradient: fd %.6e adjoint %.6e rel %.3e %s\n", i, fd_w,
                    g.spike_v[i], rel_w, rel_w <= 1e-6 ? "ok" : "FAIL");
        ok = ok && rel_w <= 1e-6;
    }

    std::printf(ok ? "all checks passed\n" : "CHECKS FAILED\n");
    return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Point-source recovery from line-of-sight absorption data"};
    app.require_subcommand(1);

    CommonOpts run_o, sim_o, met_o, chk_o;
    std::string sources_path;

    CLI::App* run_cmd = app.add_subcommand("run", "Simulate data and run the optimizer");
    add_common(run_cmd, run_o);
    CLI::App* sim_cmd = app.add_subcommand("simulate", "Write simulated data only");
    add_common(sim_cmd, sim_o);
    CLI::App* met_cmd = app.add_subcommand("metrics", "Score a source table against the truth");
    add_common(met_cmd, met_o);
    met_cmd->add_option("sources", sources_path, "Path to a sources.csv")->required();
    CLI::App* chk_cmd = app.add_subcommand("check", "Adjoint and gradient self-tests");
    add_common(chk_cmd, chk_o);

    try {
        app.parse(argc, argv);
        if (run_cmd->parsed()) return cmd_run(run_o);
        if (sim_cmd->parsed()) return cmd_simulate(sim_o);
        if (met_cmd->parsed()) return cmd_metrics(met_o, sources_path);
        if (chk_cmd->parsed()) return cmd_check(chk_o);
        return 1;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
