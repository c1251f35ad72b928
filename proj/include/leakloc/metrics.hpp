#pragma once

#include <string>
#include <vector>

#include "leakloc/assembly.hpp"

namespace leakloc {

struct MatchedPair {
    int reported = -1;        // index into the reported spike list
    int truth = -1;           // index into the true spike list
    double distance = 0.0;
    double rate_rel_error = 0.0;  // |reported - true| / true
};

struct RecoveryMetrics {
    std::vector<MatchedPair> pairs;
    int unmatched_reported = 0;
    int unmatched_truth = 0;
    double mass_reported = 0.0;
    double mass_true = 0.0;
    double mass_rel_error = 0.0;
    double final_objective = 0.0;
};

// Greedy association by ascending pairwise distance; ties go to the lower
// true index, then the lower reported index. Pairs farther than radius apart
// stay unmatched, and each spike on either side is used at most once.
RecoveryMetrics compute_metrics(const DiracMeasure& reported, const DiracMeasure& truth,
                                double radius = 0.1, double final_objective = 0.0);

// Two-column key/value CSV (header "metric,value").
std::string format_metrics_csv(const RecoveryMetrics& m);

}  // namespace leakloc
