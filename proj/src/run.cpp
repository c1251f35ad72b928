#include "leakloc/run.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "leakloc/io.hpp"

namespace leakloc {

namespace {

struct Scene {
    StructuredMesh mesh;
    OperatorSet ops;
    std::vector<Beam> beams;
    SpMat A;
    SimulatedData sim;
};

Scene stage_scene(const ExperimentConfig& c) {
    Scene s;
    s.mesh = build_mesh(c.mesh.nx, c.mesh.ny, c.mesh.Lx, c.mesh.Ly);
    s.ops = assemble_operators(s.mesh);
    s.beams = enumerate_beams(c.lasers, c.mesh.Lx, c.mesh.Ly);
    s.A = assemble_observation(s.mesh, s.beams, c.lasers.n_seg);
    PhysicalParams truth{c.truth.k, c.truth.c};
    s.sim = simulate_data(s.mesh, s.ops, s.beams, c.lasers.n_seg, truth, c.truth.mu,
                          c.time, c.noise, c.rng_seed);
    return s;
}

// snapshot columns: the coarse index nearest each requested fraction of T
std::vector<int> snapshot_indices(const SimSpec& spec) {
    std::vector<int> idx;
    for (double f : kSnapshotFractions) {
        int i = static_cast<int>(std::lround(f * spec.N_T));
        idx.push_back(std::clamp(i, 0, spec.N_T));
    }
    return idx;
}

void write_snapshots(const std::string& dir, const std::string& prefix,
                     const StructuredMesh& mesh, const Eigen::MatrixXd& coarse,
                     const SimSpec& spec) {
    char tag[32];
    for (int i : snapshot_indices(spec)) {
        const double t = i * spec.coarse_dt();
        std::snprintf(tag, sizeof(tag), "%s_t%.2f.txt", prefix.c_str(), t);
        write_text_file(dir + "/" + tag, format_snapshot(mesh, coarse.col(i), t));
    }
}

// data-generation artifacts shared by run and simulate
void write_scene(const std::string& dir, const ExperimentConfig& c, const Scene& s) {
    std::filesystem::create_directories(dir);
    write_text_file(dir + "/config_echo.json", dump_config(c));
    write_text_file(dir + "/beams.txt", format_beam_table(s.beams));
    write_text_file(dir + "/data.csv", format_data_csv(s.sim.b));

    PhysicalParams truth{c.truth.k, c.truth.c};
    SimSpec truth_spec = c.time;
    truth_spec.n_sub = s.sim.truth_n_sub;
    const Eigen::VectorXd u0 = Eigen::VectorXd::Zero(s.mesh.n_nodes());
    auto traj = solve_forward(s.mesh, s.ops, truth, c.truth.mu, u0, truth_spec);
    write_snapshots(dir, "truth", s.mesh, traj.coarse, c.time);
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& config) {
    RunOutcome out;
    const std::string dir = config.out_dir;
    Scene s = stage_scene(config);
    write_scene(dir, config, s);

    RegConfig reg = config.reg;
    reg.k_ref = s.sim.k_ref;
    reg.c_ref = s.sim.c_ref;
    InverseProblem prob{s.mesh, s.ops, s.A, s.sim.b, config.time, reg};

    RunResult res;
    try {
        res = run_optimizer(prob, config.optimizer, config.variant);
    } catch (const std::exception& e) {
        write_text_file(dir + "/error.txt", std::string(e.what()) + "\n");
        out.exit_code = 2;
        return out;
    }

    write_text_file(dir + "/log.csv", format_iteration_log(res.log));
    write_text_file(dir + "/sources.csv",
                    format_sources_csv(res.state.mu, config.optimizer.weight_floor_rel));

    out.reported = floored_measure(res.state.mu, config.optimizer.weight_floor_rel);
    out.params = res.state.params;
    out.final_objective = res.objective.total;
    out.metrics = compute_metrics(out.reported, config.truth.mu, 0.1, res.objective.total);
    write_text_file(dir + "/metrics.csv", format_metrics_csv(out.metrics));

    SimSpec recon_spec = config.time;
    recon_spec.n_sub = std::max(recon_spec.n_sub,
                                cfl_substeps(s.mesh, res.state.params,
                                             recon_spec.coarse_dt(), recon_spec.cfl_safety));
    const Eigen::VectorXd u0 = Eigen::VectorXd::Zero(s.mesh.n_nodes());
    auto traj = solve_forward(s.mesh, s.ops, res.state.params, res.state.mu, u0, recon_spec);
    write_snapshots(dir, "recon", s.mesh, traj.coarse, config.time);
    return out;
}

int simulate_experiment(const ExperimentConfig& config) {
    Scene s = stage_scene(config);
    write_scene(config.out_dir, config, s);
    return 0;
}

}  // namespace leakloc
