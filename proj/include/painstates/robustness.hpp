#pragma once

#include <map>
#include <string>
#include <vector>

#include "painstates/model.hpp"

namespace painstates {

struct RobustnessReport {
    std::string variant;  // all | high_responders_excluded | temporal_window
    std::string window;   // pre_event | event_to_6mo | 6mo_to_12mo (temporal only)
    std::size_t rows = 0;
    std::vector<int> alignment;    // reference state -> split state
    std::vector<double> centroid_cosines;
    double ari_to_reference = 0.0;
    bool skipped = false;
    std::string note;
};

struct RobustnessConfig {
    /// Participants above mean + this many SD of responses/day are the
    /// high-responder group.
    double high_responder_sd = 2.0;
    int half_year_days = 183;
    KMeansOptions kmeans;
};

/// Refits k-means at the reference model's k (and seed) on each configured
/// split, aligns the refit centroids to the reference, and reports the label
/// agreement. Splits smaller than k*10 rows are skipped with a note.
/// Temporal windows require per-participant event dates; the high-responder
/// split requires responses/day rates.
std::vector<RobustnessReport> robustness_splits(
    const FeatureTable& features, const ClusterModel& reference,
    const std::map<std::string, double>& response_rates,
    const std::map<std::string, Date>& event_dates, const RobustnessConfig& config = {});

ordered_json robustness_to_json(const std::vector<RobustnessReport>& reports);

}  // namespace painstates
