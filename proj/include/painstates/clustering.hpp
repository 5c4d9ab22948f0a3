#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "painstates/matrix.hpp"

namespace painstates {

struct KMeansOptions {
    int restarts = 50;
    int max_iter = 300;
    double tol = 1e-6;  // relative WCSS change per Lloyd iteration
};

struct KMeansResult {
    int k = 0;
    Matrix centroids;         // k x d
    std::vector<int> labels;  // per input row
    double wcss = 0.0;
    int best_restart = -1;
    int iterations = 0;
    /// WCSS after each Lloyd iteration of the winning restart; monotone
    /// non-increasing by construction (asserted).
    std::vector<double> wcss_history;
};

/// Lloyd's algorithm from explicit starting centroids. Empty clusters are
/// repaired by reseeding with the point farthest from its assigned centroid.
KMeansResult lloyd(const Matrix& X, Matrix centroids, const KMeansOptions& options = {});

/// k-means with Euclidean distance: k-means++ seeding per restart, restarts
/// run independently (in parallel) on per-restart derived seeds, best WCSS
/// wins with ties to the lowest restart index. Deterministic for a given
/// (X, seed) at any thread count.
KMeansResult kmeans(const Matrix& X, int k, std::uint64_t seed,
                    const KMeansOptions& options = {});

double wcss_of(const Matrix& X, const Matrix& centroids, std::span<const int> labels);

/// Best-restart WCSS for each k in [k_min, k_max].
std::vector<double> wcss_curve(const Matrix& X, int k_min, int k_max, std::uint64_t seed,
                               const KMeansOptions& options = {});

/// Mean silhouette over points (Euclidean). Singletons score 0. Requires at
/// least 2 clusters, each non-empty.
double silhouette(const Matrix& X, std::span<const int> labels);

/// Adjusted Rand index between two labelings of the same rows.
double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

/// Bottom-up Ward linkage cut at k clusters, computed with the
/// nearest-neighbor chain so memory stays O(n). Merge ties break toward the
/// lowest original point index. Labels are numbered by first appearance.
std::vector<int> agglomerative_ward(const Matrix& X, int k);

struct ConsensusResult {
    int n = 0;
    /// Upper-triangle consensus values, row-major (i < j); NaN where the pair
    /// was never co-sampled.
    std::vector<double> matrix;
    double pac = 0.0;
    std::size_t evaluated_pairs = 0;  // co-sampled pairs entering the PAC

    double at(std::size_t i, std::size_t j) const;
};

struct ConsensusOptions {
    int resamples = 100;
    double fraction = 0.8;
    /// Inner k-means restarts per resample (full restarts would be wasted on
    /// subsamples).
    KMeansOptions kmeans{.restarts = 10};
    /// PAC counts entries strictly inside (lower, upper).
    double pac_lower = 0.1;
    double pac_upper = 0.9;
};

/// Monti-style consensus: subsample rows without replacement, cluster, and
/// count co-clustering per co-sampled pair.
ConsensusResult consensus(const Matrix& X, int k, std::uint64_t seed,
                          const ConsensusOptions& options = {});

struct KSelectionReport {
    std::vector<int> k_range;
    std::vector<double> wcss_curve;
    std::vector<double> silhouette_curve;
    std::vector<double> agglomerative_ari_curve;
    std::vector<double> consensus_pac_curve;
    int chosen_k = 0;
    std::map<std::string, int> votes;  // per-criterion chosen k
};

struct SelectKOptions {
    KMeansOptions kmeans{.restarts = 20};
    ConsensusOptions consensus;
    /// Silhouette and consensus votes run on a deterministic row subsample
    /// when the table exceeds these caps (both are O(n^2) per k).
    std::size_t silhouette_max_n = 4000;
    std::size_t consensus_max_n = 2000;
};

/// Converging-evidence model selection: WCSS elbow (largest second
/// difference, with k=1 computed internally so the smallest k is eligible),
/// silhouette maximum, k-means/Ward cross-method agreement (ARI), and
/// consensus PAC minimum. Majority vote, ties toward smaller k.
KSelectionReport select_k(const Matrix& X, int k_min, int k_max, std::uint64_t seed,
                          const SelectKOptions& options = {});

/// Exact minimum-cost assignment (Hungarian algorithm) on a square cost
/// matrix; returns the column matched to each row.
std::vector<int> min_cost_assignment(const Matrix& cost);

struct Alignment {
    /// mapping[i] = index of b's centroid matched to a's centroid i.
    std::vector<int> mapping;
    double total_distance = 0.0;
    std::vector<double> cosines;  // per matched pair
};

/// Bijective centroid matching minimizing total Euclidean distance.
Alignment align_centroids(const Matrix& a, const Matrix& b);

}  // namespace painstates
