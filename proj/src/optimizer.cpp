#include "leakloc/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <limits>
#include <stdexcept>
#include <string>

namespace leakloc {

namespace {

double surrogate_value(const std::vector<double>& v, const std::vector<double>& prev,
                       const std::vector<double>& rates, double alpha, double tau) {
    double lin = 0.0;
    double r = 0.0;
    for (std::size_t i = 0; i < rates.size(); ++i) {
        lin += v[i] * (rates[i] - prev[i]) + alpha * rates[i];
        r += std::abs(rates[i] - prev[i]);
    }
    return lin + r * r / (2.0 * tau);
}

// distance of 0 to the subdifferential of the rate surrogate in coordinate i
double coordinate_residual(double a, double rate, double prev, double r, double tau) {
    const double d = rate - prev;
    if (rate > 0.0) {
        if (d > 0.0) return std::abs(a + r / tau);
        if (d < 0.0) return std::abs(a - r / tau);
        return std::max(0.0, std::abs(a) - r / tau);
    }
    if (d < 0.0) return std::max(0.0, r / tau - a);
    return std::max(0.0, -(a + r / tau));
}

bool same_locations(const DiracMeasure& a, const DiracMeasure& b) {
    if (a.spikes.size() != b.spikes.size()) return false;
    for (std::size_t i = 0; i < a.spikes.size(); ++i) {
        if (a.spikes[i].pos.x() != b.spikes[i].pos.x()) return false;
        if (a.spikes[i].pos.y() != b.spikes[i].pos.y()) return false;
    }
    return true;
}

// the iterates move (k, c), so every solve re-derives the sub-step count that
// keeps the explicit stepping stable at the current parameters
SimSpec stable_spec(const InverseProblem& prob, const PhysicalParams& p) {
    SimSpec spec = prob.spec;
    spec.n_sub = std::max(spec.n_sub,
                          cfl_substeps(prob.mesh, p, spec.coarse_dt(), spec.cfl_safety));
    return spec;
}

}  // namespace

int insert_candidate(const Eigen::VectorXd& v_field) {
    int best = 0;
    for (int i = 1; i < v_field.size(); ++i)
        if (v_field[i] < v_field[best]) best = i;
    return best;
}

InnerSolveResult inner_weight_solve(const std::vector<double>& v_values,
                                    const std::vector<double>& prev_rates,
                                    double alpha, double tau, double eps,
                                    std::vector<double>* sweep_values) {
    if (v_values.size() != prev_rates.size())
        throw std::invalid_argument("inner_weight_solve: mismatched support sizes");
    const std::size_t m = v_values.size();
    InnerSolveResult out;
    out.rates = prev_rates;
    if (m == 0) return out;

    constexpr int kMaxSweeps = 10000;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        double r = 0.0;
        for (std::size_t i = 0; i < m; ++i) r += std::abs(out.rates[i] - prev_rates[i]);
        double worst = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            worst = std::max(worst, coordinate_residual(v_values[i] + alpha, out.rates[i],
                                                        prev_rates[i], r, tau));
        if (worst <= eps) return out;

        for (std::size_t i = 0; i < m; ++i) {
            const double a = v_values[i] + alpha;
            const double R = r - std::abs(out.rates[i] - prev_rates[i]);
            double next;
            if (a < -R / tau)
                next = prev_rates[i] - R - tau * a;
            else if (a > R / tau)
                next = std::max(0.0, prev_rates[i] + R - tau * a);
            else
                next = prev_rates[i];
            out.rates[i] = next;
            r = R + std::abs(next - prev_rates[i]);
        }
        out.sweeps = sweep + 1;
        if (sweep_values)
            sweep_values->push_back(surrogate_value(v_values, prev_rates, out.rates, alpha, tau));
    }
    out.converged = false;
    return out;
}

double optimality_certificate(const Eigen::VectorXd& v_field,
                              const std::vector<double>& v_support,
                              const std::vector<double>& rates,
                              const std::vector<double>& prev_rates,
                              double alpha, double tau) {
    double r = 0.0;
    for (std::size_t i = 0; i < rates.size(); ++i) r += std::abs(rates[i] - prev_rates[i]);

    double residual = std::max(0.0, -(v_field.minCoeff() + alpha + r / tau));
    for (std::size_t i = 0; i < rates.size(); ++i) {
        const double a = v_support[i] + alpha;
        double part;
        if (rates[i] > 0.0) {
            const double d = rates[i] - prev_rates[i];
            if (d != 0.0)
                part = std::abs(a + (d > 0.0 ? 1.0 : -1.0) * r / tau);
            else
                part = std::max(0.0, std::abs(a) - r / tau);
        } else {
            part = std::max(0.0, -(a - r / tau));
        }
        residual = std::max(residual, part);
    }
    return residual;
}

double prox_box_quadratic(double temp, double weight, double ref,
                          double lo, double hi, double sigma) {
    const double unconstrained = (temp + sigma * weight * ref) / (1.0 + sigma * weight);
    return std::clamp(unconstrained, lo, hi);
}

PhysicalParams kc_prox(const PhysicalParams& p, double g_k,
                       const Eigen::Vector2d& g_c, const RegConfig& reg,
                       double sigma) {
    PhysicalParams out = p;
    out.k0 = prox_box_quadratic(p.k0 - sigma * g_k, reg.k_weight, reg.k_ref,
                                reg.k_min, reg.k_max, sigma);
    for (int d = 0; d < 2; ++d)
        out.c[d] = prox_box_quadratic(p.c[d] - sigma * g_c[d], reg.c_weight,
                                      reg.c_ref[d], reg.c_min, reg.c_max, sigma);
    return out;
}

DiracMeasure slide_measure(const StructuredMesh& mesh, const DiracMeasure& mu,
                           const std::vector<Eigen::Vector2d>& spike_grads,
                           double step) {
    if (spike_grads.size() != mu.spikes.size())
        throw std::invalid_argument("slide_measure: one gradient per spike required");
    DiracMeasure out = mu;
    for (std::size_t i = 0; i < out.spikes.size(); ++i) {
        Eigen::Vector2d pos = out.spikes[i].pos - step * spike_grads[i];
        pos.x() = std::clamp(pos.x(), 0.0, mesh.Lx);
        pos.y() = std::clamp(pos.y(), 0.0, mesh.Ly);
        out.spikes[i].pos = pos;
    }
    return out;
}

Iterate fb_step(const InverseProblem& prob, const Iterate& x,
                const GradientBundle& g, const OptConfig& cfg, int outer_iter,
                StepStats* stats) {
    const int node = insert_candidate(g.v_field);
    const Eigen::Vector2d candidate = prob.mesh.nodes.row(node).transpose();

    std::vector<Eigen::Vector2d> support;
    std::vector<double> v_support;
    std::vector<double> prev;
    support.reserve(x.mu.spikes.size() + 1);
    for (std::size_t i = 0; i < x.mu.spikes.size(); ++i) {
        support.push_back(x.mu.spikes[i].pos);
        v_support.push_back(g.spike_v[i]);
        prev.push_back(x.mu.spikes[i].rate);
    }
    bool duplicate = false;
    for (const auto& s : x.mu.spikes)
        if (s.pos.x() == candidate.x() && s.pos.y() == candidate.y()) duplicate = true;
    if (!duplicate) {
        support.push_back(candidate);
        v_support.push_back(g.v_field[node]);
        prev.push_back(0.0);
    }

    const double n1 = double(outer_iter) + 1.0;
    const double eps_n = cfg.eps0 / (n1 * n1);
    auto inner = inner_weight_solve(v_support, prev, prob.reg.alpha, cfg.tau, eps_n);

    Iterate next;
    for (std::size_t i = 0; i < support.size(); ++i)
        if (inner.rates[i] > 0.0) next.mu.spikes.push_back({support[i], inner.rates[i]});

    next.params = cfg.fit_kc ? kc_prox(x.params, g.g_k, g.g_c, prob.reg, cfg.sigma)
                             : x.params;

    if (stats) {
        stats->inner_iters = inner.sweeps;
        stats->inner_converged = inner.converged;
        stats->certificate = optimality_certificate(g.v_field, v_support, inner.rates,
                                                    prev, prob.reg.alpha, cfg.tau);
    }
    return next;
}

MergeOutcome merge_spikes(const DiracMeasure& mu, double radius,
                          const std::function<double(const DiracMeasure&)>& objective_eval,
                          double f_current, double tol0, int events_before) {
    MergeOutcome out{mu, 0, f_current};
    const int n = int(mu.spikes.size());
    if (n < 2) return out;

    struct Pair {
        double dist;
        int i, j;
    };
    std::vector<Pair> pairs;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double d = (mu.spikes[i].pos - mu.spikes[j].pos).norm();
            if (d <= radius) pairs.push_back({d, i, j});
        }
    if (pairs.empty()) return out;
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        if (a.dist != b.dist) return a.dist > b.dist;
        if (a.i != b.i) return a.i < b.i;
        return a.j < b.j;
    });

    std::vector<Spike> spikes(mu.spikes.begin(), mu.spikes.end());
    std::vector<bool> dead(n, false);
    double f_run = f_current;
    int events = events_before;

    for (const Pair& p : pairs) {
        if (dead[p.i] || dead[p.j]) continue;
        int survivor = p.i, gone = p.j;
        if (spikes[p.j].rate > spikes[p.i].rate) {
            survivor = p.j;
            gone = p.i;
        }
        DiracMeasure trial;
        for (int s = 0; s < n; ++s) {
            if (dead[s] || s == gone) continue;
            Spike sp = spikes[s];
            if (s == survivor) sp.rate += spikes[gone].rate;
            trial.spikes.push_back(sp);
        }
        const double f_try = objective_eval(trial);
        const double tol = tol0 * std::pow(0.9, events);
        if (f_try <= f_run + tol) {
            spikes[survivor].rate += spikes[gone].rate;
            dead[gone] = true;
            f_run = f_try;
            ++events;
            ++out.accepted;
        }
    }

    if (out.accepted > 0) {
        out.mu.spikes.clear();
        for (int s = 0; s < n; ++s)
            if (!dead[s]) out.mu.spikes.push_back(spikes[s]);
        out.objective = f_run;
    }
    return out;
}

ObjectiveParts evaluate_objective(const InverseProblem& prob, const Iterate& x) {
    const Eigen::VectorXd u0 = Eigen::VectorXd::Zero(prob.mesh.n_nodes());
    auto traj = solve_forward(prob.mesh, prob.ops, x.params, x.mu, u0,
                              stable_spec(prob, x.params));
    return objective(prob.A, traj.coarse, prob.data, x.mu, x.params, prob.reg);
}

RunResult run_optimizer(const InverseProblem& prob, const OptConfig& cfg,
                        Variant variant,
                        const std::function<void(int, const Iterate&)>& observer) {
    RunResult result;
    Iterate x{DiracMeasure{}, PhysicalParams{prob.reg.k_ref, prob.reg.c_ref}};
    const Eigen::VectorXd u0 = Eigen::VectorXd::Zero(prob.mesh.n_nodes());
    const std::clock_t start = std::clock();

    StepStats carry;
    bool carry_merged = false;
    double merge_tol_base = 0.0;
    // merge tolerance decays across the whole run, so the total objective
    // increase the merges may introduce is a convergent geometric series
    int merge_events = 0;

    for (int n = 0;; ++n) {
        const bool last = n >= cfg.max_outer;
        const SimSpec spec = stable_spec(prob, x.params);
        auto traj = solve_forward(prob.mesh, prob.ops, x.params, x.mu, u0, spec, !last);
        // gradients are taken of the mean misfit, so the residual is weighted
        const double inv_n_data = 1.0 / double(prob.data.size());
        const Eigen::MatrixXd residual =
            (observe(prob.A, traj.coarse) - prob.data) * inv_n_data;
        ObjectiveParts F = objective(prob.A, traj.coarse, prob.data, x.mu, x.params,
                                     prob.reg);
        if (!std::isfinite(F.total))
            throw SolverFailure("objective is not finite at iteration " + std::to_string(n));
        // merge tolerances are anchored to the data energy, not the shrinking fit
        if (n == 0) merge_tol_base = cfg.merge_tol_rel * F.total;

        IterationRecord rec;
        rec.iter = n;
        rec.value = F.total;
        // the clock starts at the first iterate, so row 0 is exactly zero
        rec.cpu_time = n == 0 ? 0.0 : double(std::clock() - start) / CLOCKS_PER_SEC;
        rec.n_spikes = int(x.mu.spikes.size());
        rec.inner_iters = carry.inner_iters;
        rec.k0 = x.params.k0;
        rec.c1 = x.params.c.x();
        rec.c2 = x.params.c.y();
        rec.slide = carry.slide_accepted ? 1 : 0;
        rec.merged = carry_merged ? 1 : 0;
        result.log.push_back(rec);
        if (observer) observer(n, x);

        if (last) {
            result.state = x;
            result.objective = F;
            return result;
        }

        GradientBundle bundle = gradient(prob.mesh, prob.ops, x.params, x.mu, traj,
                                         prob.A, residual, spec);

        StepStats stats;
        Iterate base = x;
        const GradientBundle* grads = &bundle;
        GradientBundle slid_bundle;
        if (variant == Variant::Sliding && !x.mu.spikes.empty()) {
            for (int t = 0; t < cfg.slide_max_tries; ++t) {
                const double scale = std::pow(cfg.slide_shrink, t);
                DiracMeasure moved = slide_measure(prob.mesh, x.mu, bundle.spike_grad,
                                                   scale * cfg.theta * cfg.tau);
                if (same_locations(moved, x.mu)) break;  // no transport, reuse bundle
                auto traj_try = solve_forward(prob.mesh, prob.ops, x.params, moved, u0,
                                              spec, true);
                const Eigen::MatrixXd res_try =
                    (observe(prob.A, traj_try.coarse) - prob.data) * inv_n_data;
                ObjectiveParts F_try = objective(prob.A, traj_try.coarse, prob.data,
                                                 moved, x.params, prob.reg);
                if (F_try.total <= F.total) {
                    base.mu = moved;
                    slid_bundle = gradient(prob.mesh, prob.ops, x.params, moved, traj_try,
                                           prob.A, res_try, spec);
                    grads = &slid_bundle;
                    stats.slide_accepted = true;
                    break;
                }
            }
        }

        Iterate next = fb_step(prob, base, *grads, cfg, n, &stats);

        carry_merged = false;
        if (cfg.merge_period > 0 && (n + 1) % cfg.merge_period == 0 &&
            next.mu.spikes.size() >= 2) {
            bool any_pair = false;
            for (std::size_t i = 0; i < next.mu.spikes.size() && !any_pair; ++i)
                for (std::size_t j = i + 1; j < next.mu.spikes.size(); ++j)
                    if ((next.mu.spikes[i].pos - next.mu.spikes[j].pos).norm() <=
                        cfg.merge_radius) {
                        any_pair = true;
                        break;
                    }
            if (any_pair) {
                Iterate probe = next;
                const double f_pass = evaluate_objective(prob, probe).total;
                auto eval = [&](const DiracMeasure& m) {
                    Iterate trial{m, next.params};
                    return evaluate_objective(prob, trial).total;
                };
                MergeOutcome merged = merge_spikes(next.mu, cfg.merge_radius, eval,
                                                   f_pass, merge_tol_base, merge_events);
                if (merged.accepted > 0) {
                    next.mu = merged.mu;
                    carry_merged = true;
                    merge_events += merged.accepted;
                }
            }
        }

        carry = stats;
        x = next;
    }
}

}  // namespace leakloc
