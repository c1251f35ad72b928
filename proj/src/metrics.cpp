#include "leakloc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace leakloc {

RecoveryMetrics compute_metrics(const DiracMeasure& reported, const DiracMeasure& truth,
                                double radius, double final_objective) {
    struct Cand {
        double d;
        int t;
        int r;
    };
    std::vector<Cand> cands;
    for (int r = 0; r < static_cast<int>(reported.spikes.size()); ++r)
        for (int t = 0; t < static_cast<int>(truth.spikes.size()); ++t) {
            const double d = (reported.spikes[r].pos - truth.spikes[t].pos).norm();
            if (d <= radius) cands.push_back({d, t, r});
        }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.d != b.d) return a.d < b.d;
        if (a.t != b.t) return a.t < b.t;
        return a.r < b.r;
    });

    RecoveryMetrics m;
    m.final_objective = final_objective;
    std::vector<bool> r_used(reported.spikes.size(), false);
    std::vector<bool> t_used(truth.spikes.size(), false);
    for (const Cand& c : cands) {
        if (r_used[c.r] || t_used[c.t]) continue;
        r_used[c.r] = true;
        t_used[c.t] = true;
        const double tr = truth.spikes[c.t].rate;
        const double rr = reported.spikes[c.r].rate;
        m.pairs.push_back({c.r, c.t, c.d, tr > 0.0 ? std::abs(rr - tr) / tr : std::abs(rr)});
    }
    std::sort(m.pairs.begin(), m.pairs.end(),
              [](const MatchedPair& a, const MatchedPair& b) { return a.truth < b.truth; });
    for (bool u : r_used) m.unmatched_reported += u ? 0 : 1;
    for (bool u : t_used) m.unmatched_truth += u ? 0 : 1;
    m.mass_reported = reported.radon_norm();
    m.mass_true = truth.radon_norm();
    m.mass_rel_error = m.mass_true > 0.0
                           ? std::abs(m.mass_reported - m.mass_true) / m.mass_true
                           : m.mass_reported;
    return m;
}

std::string format_metrics_csv(const RecoveryMetrics& m) {
    char buf[160];
    std::string out = "metric,value\n";
    auto put_int = [&](const char* key, int v) {
        std::snprintf(buf, sizeof(buf), "%s,%d\n", key, v);
        out += buf;
    };
    auto put = [&](const std::string& key, double v) {
        std::snprintf(buf, sizeof(buf), "%s,%.17g\n", key.c_str(), v);
        out += buf;
    };
    put_int("n_matched", static_cast<int>(m.pairs.size()));
    put_int("n_unmatched_reported", m.unmatched_reported);
    put_int("n_unmatched_truth", m.unmatched_truth);
    put("mass_reported", m.mass_reported);
    put("mass_true", m.mass_true);
    put("mass_rel_error", m.mass_rel_error);
    put("final_objective", m.final_objective);
    for (std::size_t i = 0; i < m.pairs.size(); ++i) {
        const std::string tag = "pair" + std::to_string(i) + "_";
        put(tag + "true_index", m.pairs[i].truth);
        put(tag + "reported_index", m.pairs[i].reported);
        put(tag + "location_error", m.pairs[i].distance);
        put(tag + "rate_rel_error", m.pairs[i].rate_rel_error);
    }
    return out;
}

}  // namespace leakloc
