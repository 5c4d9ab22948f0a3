#include "painstates/robustness.hpp"

#include <algorithm>
#include <cmath>

namespace painstates {

namespace {

std::vector<int> assign_by_model(const ClusterModel& model, const Matrix& X) {
    std::vector<int> labels(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        const auto d = centroid_distances(model, X.row(i));
        labels[i] = int(std::min_element(d.begin(), d.end()) - d.begin());
    }
    return labels;
}

RobustnessReport fit_split(const FeatureTable& features, const std::vector<std::size_t>& rows,
                           const ClusterModel& reference, const RobustnessConfig& config,
                           std::string variant, std::string window) {
    RobustnessReport report;
    report.variant = std::move(variant);
    report.window = std::move(window);
    report.rows = rows.size();
    if (rows.size() < std::size_t(reference.k) * 10) {
        report.skipped = true;
        report.note = "split has fewer than k*10 samples";
        return report;
    }
    Matrix X(rows.size(), features.values.cols());
    for (std::size_t i = 0; i < rows.size(); ++i)
        std::copy_n(features.values.row(rows[i]).begin(), X.cols(), X.row(i).begin());

    KMeansResult refit;
    try {
        refit = kmeans(X, reference.k, reference.seed, config.kmeans);
    } catch (const DataError& e) {
        report.skipped = true;
        report.note = e.what();
        return report;
    }
    const Alignment alignment = align_centroids(reference.centroids, refit.centroids);
    report.alignment = alignment.mapping;
    report.centroid_cosines = alignment.cosines;
    report.ari_to_reference = adjusted_rand_index(assign_by_model(reference, X), refit.labels);
    return report;
}

}  // namespace

std::vector<RobustnessReport> robustness_splits(
    const FeatureTable& features, const ClusterModel& reference,
    const std::map<std::string, double>& response_rates,
    const std::map<std::string, Date>& event_dates, const RobustnessConfig& config) {
    if (features.feature_names != reference.feature_names)
        throw DataError("feature table does not match reference model feature space");

    std::vector<RobustnessReport> reports;
    std::vector<std::size_t> all_rows(features.size());
    for (std::size_t i = 0; i < features.size(); ++i) all_rows[i] = i;
    reports.push_back(fit_split(features, all_rows, reference, config, "all", ""));

    // High-responder exclusion: drop participants whose responses/day exceed
    // the cohort mean + high_responder_sd * SD.
    if (!response_rates.empty()) {
        double mean = 0.0;
        for (const auto& [pid, r] : response_rates) mean += r;
        mean /= double(response_rates.size());
        double ss = 0.0;
        for (const auto& [pid, r] : response_rates) ss += (r - mean) * (r - mean);
        const double sd = std::sqrt(ss / double(response_rates.size()));
        const double cutoff = mean + config.high_responder_sd * sd;
        std::vector<std::size_t> keep;
        for (std::size_t i = 0; i < features.size(); ++i) {
            auto it = response_rates.find(features.participant_ids[i]);
            const double rate = it == response_rates.end() ? 0.0 : it->second;
            if (rate <= cutoff) keep.push_back(i);
        }
        reports.push_back(
            fit_split(features, keep, reference, config, "high_responders_excluded", ""));
    }

    // Temporal windows anchored on per-participant event dates.
    if (!event_dates.empty()) {
        const int half = config.half_year_days;
        const char* names[3] = {"pre_event", "event_to_6mo", "6mo_to_12mo"};
        for (int w = 0; w < 3; ++w) {
            std::vector<std::size_t> rows;
            for (std::size_t i = 0; i < features.size(); ++i) {
                auto it = event_dates.find(features.participant_ids[i]);
                if (it == event_dates.end()) continue;
                const int offset = features.dates[i].days_since(it->second);
                const bool in_window = w == 0   ? offset < 0
                                       : w == 1 ? (offset >= 0 && offset < half)
                                                : (offset >= half && offset < 2 * half);
                if (in_window) rows.push_back(i);
            }
            reports.push_back(
                fit_split(features, rows, reference, config, "temporal_window", names[w]));
        }
    }
    return reports;
}

ordered_json robustness_to_json(const std::vector<RobustnessReport>& reports) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : reports) {
        ordered_json j;
        j["variant"] = r.variant;
        j["window"] = r.window;
        j["rows"] = r.rows;
        j["skipped"] = r.skipped;
        j["note"] = r.note;
        j["alignment"] = r.alignment;
        j["centroid_cosines"] = r.centroid_cosines;
        j["ari_to_reference"] = r.ari_to_reference;
        arr.push_back(j);
    }
    return arr;
}

}  // namespace painstates
