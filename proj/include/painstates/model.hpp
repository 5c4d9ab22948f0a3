#pragma once

#include <optional>
#include <string>
#include <vector>

#include "painstates/clustering.hpp"
#include "painstates/features.hpp"
#include "painstates/jsonio.hpp"

namespace painstates {

/// A fitted state model: centroids in normalized feature space plus
/// everything needed to apply it to new data and to interpret its states.
struct ClusterModel {
    int k = 0;
    std::vector<std::string> feature_names;
    Matrix centroids;  // k x d, d == feature_names.size()
    NormalizationParams normalization;
    ComposeOptions compose;
    std::uint64_t seed = 0;
    double wcss = 0.0;
    std::optional<KSelectionReport> selection;
    /// Ordinal label per centroid index ("A" best), filled by validation.
    std::vector<std::string> ranking;

    void check() const;
    bool has_ranking() const { return !ranking.empty(); }
    /// Centroid index carrying ordinal label `label`.
    std::size_t state_of_label(const std::string& label) const;
    /// States ordered best-to-worst (by label); empty when unranked.
    std::vector<std::size_t> states_by_rank() const;
};

/// Ordinal label for rank r: A, B, ... Z, then S26, S27, ...
std::string ordinal_label(std::size_t rank);

ordered_json selection_to_json(const KSelectionReport& report);
KSelectionReport selection_from_json(const ordered_json& j);

ordered_json model_to_json(const ClusterModel& model);
ClusterModel model_from_json(const ordered_json& j);

void save_model(const ClusterModel& model, const std::string& path);
ClusterModel load_model(const std::string& path);

/// Euclidean distance from a feature row to each centroid, in model order.
std::vector<double> centroid_distances(const ClusterModel& model,
                                       std::span<const double> features);

}  // namespace painstates
