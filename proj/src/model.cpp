#include "painstates/model.hpp"

#include <algorithm>
#include <cmath>

namespace painstates {

void ClusterModel::check() const {
    if (k < 1) throw InvariantError("model: k < 1");
    if (centroids.rows() != std::size_t(k)) throw InvariantError("model: centroid count != k");
    if (centroids.cols() != feature_names.size())
        throw InvariantError("model: centroid dimension != feature count");
    for (std::size_t i = 0; i < centroids.rows(); ++i)
        for (std::size_t j = 0; j < centroids.cols(); ++j)
            if (!std::isfinite(centroids(i, j)))
                throw InvariantError("model: non-finite centroid entry");
    if (!ranking.empty() && ranking.size() != std::size_t(k))
        throw InvariantError("model: ranking size != k");
}

std::size_t ClusterModel::state_of_label(const std::string& label) const {
    for (std::size_t s = 0; s < ranking.size(); ++s)
        if (ranking[s] == label) return s;
    throw DataError("no state carries label '" + label + "'");
}

std::vector<std::size_t> ClusterModel::states_by_rank() const {
    std::vector<std::size_t> order(ranking.size());
    for (std::size_t r = 0; r < ranking.size(); ++r) order[r] = state_of_label(ordinal_label(r));
    return order;
}

std::string ordinal_label(std::size_t rank) {
    if (rank < 26) return std::string(1, char('A' + rank));
    return "S" + std::to_string(rank);
}

ordered_json selection_to_json(const KSelectionReport& report) {
    ordered_json j;
    j["k_range"] = report.k_range;
    j["wcss_curve"] = report.wcss_curve;
    j["silhouette_curve"] = report.silhouette_curve;
    j["agglomerative_ari_curve"] = report.agglomerative_ari_curve;
    j["consensus_pac_curve"] = report.consensus_pac_curve;
    j["chosen_k"] = report.chosen_k;
    ordered_json votes;
    for (const auto& [name, k] : report.votes) votes[name] = k;
    j["votes"] = votes;
    return j;
}

KSelectionReport selection_from_json(const ordered_json& j) {
    KSelectionReport report;
    report.k_range = j.at("k_range").get<std::vector<int>>();
    report.wcss_curve = j.at("wcss_curve").get<std::vector<double>>();
    report.silhouette_curve = j.at("silhouette_curve").get<std::vector<double>>();
    report.agglomerative_ari_curve = j.at("agglomerative_ari_curve").get<std::vector<double>>();
    report.consensus_pac_curve = j.at("consensus_pac_curve").get<std::vector<double>>();
    report.chosen_k = j.at("chosen_k").get<int>();
    for (const auto& [name, k] : j.at("votes").items()) report.votes[name] = k.get<int>();
    return report;
}

ordered_json model_to_json(const ClusterModel& model) {
    model.check();
    ordered_json j;
    j["k"] = model.k;
    j["feature_names"] = model.feature_names;
    std::vector<double> flat;
    flat.reserve(model.centroids.rows() * model.centroids.cols());
    for (std::size_t i = 0; i < model.centroids.rows(); ++i)
        for (std::size_t c = 0; c < model.centroids.cols(); ++c)
            flat.push_back(model.centroids(i, c));
    j["centroids"] = flat;  // row-major
    ordered_json norm;
    norm["method"] = to_string(model.normalization.method);
    ordered_json per_q;
    for (const auto& [qid, t] : model.normalization.per_question) {
        ordered_json entry;
        entry["offset"] = t.offset;
        entry["scale"] = t.scale;
        per_q[qid] = entry;
    }
    norm["per_question"] = per_q;
    j["normalization"] = norm;
    j["lambda"] = model.compose.lambda;
    j["seed"] = model.seed;
    j["wcss"] = model.wcss;
    if (model.selection) j["selection"] = selection_to_json(*model.selection);
    else j["selection"] = nullptr;
    if (!model.ranking.empty()) j["ranking"] = model.ranking;
    else j["ranking"] = nullptr;
    return j;
}

ClusterModel model_from_json(const ordered_json& j) {
    ClusterModel model;
    model.k = j.at("k").get<int>();
    model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    const auto flat = j.at("centroids").get<std::vector<double>>();
    const std::size_t d = model.feature_names.size();
    if (flat.size() != std::size_t(model.k) * d)
        throw ParseError("model: centroid array has wrong length");
    model.centroids = Matrix(std::size_t(model.k), d);
    for (std::size_t i = 0; i < std::size_t(model.k); ++i)
        for (std::size_t c = 0; c < d; ++c) model.centroids(i, c) = flat[i * d + c];
    const auto& norm = j.at("normalization");
    model.normalization.method = normalization_from_string(norm.at("method").get<std::string>());
    for (const auto& [qid, entry] : norm.at("per_question").items())
        model.normalization.per_question[qid] = {entry.at("offset").get<double>(),
                                                 entry.at("scale").get<double>()};
    model.compose.lambda = j.at("lambda").get<double>();
    model.seed = j.at("seed").get<std::uint64_t>();
    model.wcss = j.at("wcss").get<double>();
    if (!j.at("selection").is_null()) model.selection = selection_from_json(j.at("selection"));
    if (!j.at("ranking").is_null())
        model.ranking = j.at("ranking").get<std::vector<std::string>>();
    model.check();
    return model;
}

void save_model(const ClusterModel& model, const std::string& path) {
    save_json(path, model_to_json(model));
}

ClusterModel load_model(const std::string& path) { return model_from_json(load_json(path)); }

std::vector<double> centroid_distances(const ClusterModel& model,
                                       std::span<const double> features) {
    if (features.size() != model.centroids.cols())
        throw DataError("feature vector dimension does not match model");
    std::vector<double> out(std::size_t(model.k));
    for (std::size_t s = 0; s < std::size_t(model.k); ++s)
        out[s] = euclidean_distance(features, model.centroids.row(s));
    return out;
}

}  // namespace painstates
