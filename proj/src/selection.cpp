#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "painstates/clustering.hpp"
#include "painstates/common.hpp"

namespace painstates {

namespace {

// Deterministic row subsample (seeded partial shuffle, indices re-sorted).
std::vector<std::size_t> subsample_rows(std::size_t n, std::size_t max_n, std::uint64_t seed) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (n <= max_n) return idx;
    Rng rng(Rng::derive(seed, 0x5ab5a));
    for (std::size_t i = 0; i < max_n; ++i) {
        const std::size_t j = i + std::size_t(rng.next_index(n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(max_n);
    std::sort(idx.begin(), idx.end());
    return idx;
}

Matrix take_rows(const Matrix& X, const std::vector<std::size_t>& rows) {
    Matrix out(rows.size(), X.cols());
    for (std::size_t i = 0; i < rows.size(); ++i)
        std::copy_n(X.row(rows[i]).begin(), X.cols(), out.row(i).begin());
    return out;
}

// argmax/argmin over the curve with ties to the smaller k.
int arg_best(const std::vector<int>& ks, const std::vector<double>& curve, bool maximize) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < curve.size(); ++i) {
        const bool better = maximize ? curve[i] > curve[best] : curve[i] < curve[best];
        if (better) best = i;
    }
    return ks[best];
}

}  // namespace

KSelectionReport select_k(const Matrix& X, int k_min, int k_max, std::uint64_t seed,
                          const SelectKOptions& options) {
    if (k_max - k_min + 1 < 2) throw ConfigError("k range must cover at least 2 values");
    if (k_min < 2) throw ConfigError("select_k starts at k = 2 (silhouette needs 2 clusters)");
    const std::size_t n = X.rows();
    if (std::size_t(k_max) >= n) throw ConfigError("k range exceeds sample count");

    KSelectionReport report;
    for (int k = k_min; k <= k_max; ++k) report.k_range.push_back(k);

    const auto sil_rows = subsample_rows(n, options.silhouette_max_n, seed);
    const Matrix sil_X = take_rows(X, sil_rows);
    const auto cons_rows = subsample_rows(n, options.consensus_max_n, seed ^ 0x9e37);
    const Matrix cons_X = take_rows(X, cons_rows);

    std::vector<std::vector<int>> kmeans_labels;
    for (int k : report.k_range) {
        KMeansResult km = kmeans(X, k, Rng::derive(seed, 0x6b00 + std::uint64_t(k)),
                                 options.kmeans);
        report.wcss_curve.push_back(km.wcss);
        std::vector<int> sub_labels(sil_rows.size());
        for (std::size_t i = 0; i < sil_rows.size(); ++i)
            sub_labels[i] = km.labels[sil_rows[i]];
        try {
            report.silhouette_curve.push_back(silhouette(sil_X, sub_labels));
        } catch (const DataError&) {
            // Subsample collapsed to one cluster: worst possible vote.
            report.silhouette_curve.push_back(-1.0);
        }

        const std::vector<int> ward = agglomerative_ward(X, k);
        report.agglomerative_ari_curve.push_back(adjusted_rand_index(km.labels, ward));

        ConsensusOptions cons_opts = options.consensus;
        report.consensus_pac_curve.push_back(
            consensus(cons_X, k, Rng::derive(seed, 0xca'0000 + std::uint64_t(k)), cons_opts).pac);
        kmeans_labels.push_back(std::move(km.labels));
    }

    // Elbow on the second difference of WCSS. k = 1 has a closed form (total
    // sum of squares), which makes the smallest k in range eligible.
    std::vector<double> mean(X.cols(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < X.cols(); ++j) mean[j] += X(i, j);
    for (double& v : mean) v /= double(n);
    double wcss1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) wcss1 += squared_distance(X.row(i), mean);

    std::vector<double> ext;
    if (k_min == 2) ext.push_back(wcss1);
    else ext.push_back(kmeans(X, k_min - 1, Rng::derive(seed, 0x6b00 + std::uint64_t(k_min - 1)),
                              options.kmeans).wcss);
    ext.insert(ext.end(), report.wcss_curve.begin(), report.wcss_curve.end());
    int elbow_k = report.k_range.front();
    double elbow_best = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 1; t + 1 < ext.size(); ++t) {
        const double second_diff = ext[t - 1] - 2.0 * ext[t] + ext[t + 1];
        if (second_diff > elbow_best) {
            elbow_best = second_diff;
            elbow_k = report.k_range[t - 1];
        }
    }

    report.votes["elbow"] = elbow_k;
    report.votes["silhouette"] = arg_best(report.k_range, report.silhouette_curve, true);
    report.votes["agglomerative"] = arg_best(report.k_range, report.agglomerative_ari_curve, true);
    report.votes["consensus"] = arg_best(report.k_range, report.consensus_pac_curve, false);

    // Majority vote; ties resolve toward the smaller, more stable k.
    std::map<int, int> tally;
    for (const auto& [name, k] : report.votes) ++tally[k];
    int best_count = 0;
    for (const auto& [k, c] : tally) best_count = std::max(best_count, c);
    for (const auto& [k, c] : tally) {
        if (c == best_count) {
            report.chosen_k = k;
            break;  // std::map iterates in ascending k
        }
    }
    return report;
}

}  // namespace painstates
