#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <unordered_set>

#include "painstates/clustering.hpp"
#include "painstates/common.hpp"

namespace painstates {

namespace {

// Index of the nearest centroid; ties go to the lowest index.
inline int nearest_centroid(std::span<const double> point, const Matrix& centroids,
                            double* dist_out = nullptr) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.rows(); ++c) {
        const double d = squared_distance(point, centroids.row(c));
        if (d < best_d) {
            best_d = d;
            best = int(c);
        }
    }
    if (dist_out) *dist_out = best_d;
    return best;
}

std::size_t count_distinct_rows(const Matrix& X) {
    struct RowHash {
        const Matrix* m;
        std::size_t operator()(std::size_t i) const {
            std::size_t h = 1469598103934665603ULL;
            for (double v : m->row(i)) {
                std::uint64_t bits;
                std::memcpy(&bits, &v, sizeof bits);
                h = (h ^ bits) * 1099511628211ULL;
            }
            return h;
        }
    };
    struct RowEq {
        const Matrix* m;
        bool operator()(std::size_t a, std::size_t b) const {
            auto ra = m->row(a), rb = m->row(b);
            return std::equal(ra.begin(), ra.end(), rb.begin());
        }
    };
    std::unordered_set<std::size_t, RowHash, RowEq> distinct(16, RowHash{&X}, RowEq{&X});
    for (std::size_t i = 0; i < X.rows(); ++i) distinct.insert(i);
    return distinct.size();
}

Matrix kmeanspp_seed(const Matrix& X, int k, Rng& rng) {
    const std::size_t n = X.rows(), d = X.cols();
    Matrix centroids(std::size_t(k), d);
    std::vector<double> dist2(n, std::numeric_limits<double>::infinity());

    std::size_t first = rng.next_index(n);
    std::copy_n(X.row(first).begin(), d, centroids.row(0).begin());
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d2 = squared_distance(X.row(i), centroids.row(std::size_t(c - 1)));
            if (d2 < dist2[i]) dist2[i] = d2;
            total += dist2[i];
        }
        std::size_t pick = 0;
        if (total > 0.0) {
            const double target = rng.next_double() * total;
            double acc = 0.0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                acc += dist2[i];
                if (acc > target) {
                    pick = i;
                    break;
                }
            }
        } else {
            // All remaining mass is zero (duplicates); fall back to uniform.
            pick = rng.next_index(n);
        }
        std::copy_n(X.row(pick).begin(), d, centroids.row(std::size_t(c)).begin());
    }
    return centroids;
}

}  // namespace

double wcss_of(const Matrix& X, const Matrix& centroids, std::span<const int> labels) {
    double total = 0.0;
    for (std::size_t i = 0; i < X.rows(); ++i)
        total += squared_distance(X.row(i), centroids.row(std::size_t(labels[i])));
    return total;
}

KMeansResult lloyd(const Matrix& X, Matrix centroids, const KMeansOptions& options) {
    const std::size_t n = X.rows(), d = X.cols();
    const int k = int(centroids.rows());
    if (n == 0) throw DataError("k-means on an empty matrix");
    if (centroids.cols() != d) throw DataError("centroid dimension mismatch");

    KMeansResult result;
    result.k = k;
    result.labels.assign(n, 0);
    std::vector<std::size_t> counts(std::size_t(k), 0);

    double prev_wcss = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < options.max_iter; ++iter) {
        // Assignment.
        double wcss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double d2;
            result.labels[i] = nearest_centroid(X.row(i), centroids, &d2);
            wcss += d2;
        }

        // Empty-cluster repair: reseed with the point farthest from its
        // centroid, then reassign.
        bool repaired = true;
        while (repaired) {
            repaired = false;
            std::fill(counts.begin(), counts.end(), 0);
            for (int label : result.labels) ++counts[std::size_t(label)];
            for (int c = 0; c < k; ++c) {
                if (counts[std::size_t(c)] > 0) continue;
                std::size_t farthest = 0;
                double far_d = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double d2 =
                        squared_distance(X.row(i), centroids.row(std::size_t(result.labels[i])));
                    if (d2 > far_d) {
                        far_d = d2;
                        farthest = i;
                    }
                }
                std::copy_n(X.row(farthest).begin(), d, centroids.row(std::size_t(c)).begin());
                repaired = true;
                wcss = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    double d2;
                    result.labels[i] = nearest_centroid(X.row(i), centroids, &d2);
                    wcss += d2;
                }
                break;
            }
        }

        if (wcss > prev_wcss * (1.0 + 1e-12))
            throw InvariantError("Lloyd iteration increased WCSS");
        result.wcss_history.push_back(wcss);
        result.iterations = iter + 1;

        // Update step: centroid = mean of members, accumulated in row order
        // so results do not depend on scheduling.
        Matrix sums(std::size_t(k), d);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            auto row = X.row(i);
            auto acc = sums.row(std::size_t(result.labels[i]));
            for (std::size_t j = 0; j < d; ++j) acc[j] += row[j];
            ++counts[std::size_t(result.labels[i])];
        }
        for (int c = 0; c < k; ++c)
            for (std::size_t j = 0; j < d; ++j)
                centroids(std::size_t(c), j) =
                    sums(std::size_t(c), j) / double(counts[std::size_t(c)]);

        const bool converged =
            std::isfinite(prev_wcss) &&
            (prev_wcss - wcss) <= options.tol * std::max(prev_wcss, 1e-300);
        prev_wcss = wcss;
        if (converged || wcss == 0.0) break;
    }

    // Final assignment against the updated centroids.
    double wcss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d2;
        result.labels[i] = nearest_centroid(X.row(i), centroids, &d2);
        wcss += d2;
    }
    if (!result.wcss_history.empty() && wcss > result.wcss_history.back() * (1.0 + 1e-12))
        throw InvariantError("final assignment increased WCSS");
    result.wcss_history.push_back(wcss);
    result.wcss = wcss;
    result.centroids = std::move(centroids);
    return result;
}

KMeansResult kmeans(const Matrix& X, int k, std::uint64_t seed, const KMeansOptions& options) {
    const std::size_t n = X.rows();
    if (k < 1) throw ConfigError("k must be >= 1");
    if (n == 0) throw DataError("k-means on an empty matrix");
    if (std::size_t(k) > n || count_distinct_rows(X) < std::size_t(k))
        throw DataError("infeasible k: fewer than k distinct rows");
    if (options.restarts < 1) throw ConfigError("restarts must be >= 1");

    std::vector<KMeansResult> results(std::size_t(options.restarts));
    std::vector<std::string> failures(std::size_t(options.restarts));

#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < options.restarts; ++r) {
        try {
            Rng rng(Rng::derive(seed, std::uint64_t(r)));
            Matrix init = kmeanspp_seed(X, k, rng);
            results[std::size_t(r)] = lloyd(X, std::move(init), options);
            results[std::size_t(r)].best_restart = r;
        } catch (const std::exception& e) {
            failures[std::size_t(r)] = e.what();
        }
    }
    for (const auto& f : failures)
        if (!f.empty()) throw InvariantError("k-means restart failed: " + f);

    // Best WCSS wins; ties go to the lowest restart index.
    std::size_t best = 0;
    for (std::size_t r = 1; r < results.size(); ++r)
        if (results[r].wcss < results[best].wcss) best = r;
    return std::move(results[best]);
}

std::vector<double> wcss_curve(const Matrix& X, int k_min, int k_max, std::uint64_t seed,
                               const KMeansOptions& options) {
    if (k_min < 1 || k_max < k_min) throw ConfigError("bad k range");
    if (std::size_t(k_max) > X.rows()) throw ConfigError("k range exceeds sample count");
    std::vector<double> curve;
    for (int k = k_min; k <= k_max; ++k)
        curve.push_back(kmeans(X, k, Rng::derive(seed, 0x6b00 + std::uint64_t(k)), options).wcss);
    return curve;
}

}  // namespace painstates
