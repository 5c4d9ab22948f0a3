#include "painstates/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "painstates/common.hpp"

namespace painstates::reference {

namespace {

double sqdist(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

int nearest(std::span<const double> p, const Matrix& centroids) {
    int best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.rows(); ++c) {
        const double d = sqdist(p, centroids.row(c));
        if (d < bd) {
            bd = d;
            best = int(c);
        }
    }
    return best;
}

// Same draw sequence as the production seeding, evaluated serially.
Matrix seed_centroids(const Matrix& X, int k, Rng& rng) {
    const std::size_t n = X.rows(), d = X.cols();
    Matrix centroids(std::size_t(k), d);
    std::vector<double> dist2(n, std::numeric_limits<double>::infinity());
    const std::size_t first = rng.next_index(n);
    for (std::size_t j = 0; j < d; ++j) centroids(0, j) = X(first, j);
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d2 = sqdist(X.row(i), centroids.row(std::size_t(c - 1)));
            if (d2 < dist2[i]) dist2[i] = d2;
            total += dist2[i];
        }
        std::size_t pick;
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
            pick = rng.next_index(n);
        }
        for (std::size_t j = 0; j < d; ++j) centroids(std::size_t(c), j) = X(pick, j);
    }
    return centroids;
}

KMeansResult lloyd_serial(const Matrix& X, Matrix centroids, const KMeansOptions& options) {
    const std::size_t n = X.rows(), d = X.cols();
    const int k = int(centroids.rows());
    KMeansResult res;
    res.k = k;
    res.labels.assign(n, 0);

    auto assign_all = [&]() {
        double wcss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            res.labels[i] = nearest(X.row(i), centroids);
            wcss += sqdist(X.row(i), centroids.row(std::size_t(res.labels[i])));
        }
        return wcss;
    };

    double prev = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < options.max_iter; ++iter) {
        double wcss = assign_all();
        for (;;) {
            std::vector<std::size_t> counts(std::size_t(k), 0);
            for (int l : res.labels) ++counts[std::size_t(l)];
            int empty = -1;
            for (int c = 0; c < k; ++c)
                if (counts[std::size_t(c)] == 0) {
                    empty = c;
                    break;
                }
            if (empty < 0) break;
            std::size_t far = 0;
            double fd = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double d2 = sqdist(X.row(i), centroids.row(std::size_t(res.labels[i])));
                if (d2 > fd) {
                    fd = d2;
                    far = i;
                }
            }
            for (std::size_t j = 0; j < d; ++j) centroids(std::size_t(empty), j) = X(far, j);
            wcss = assign_all();
        }
        res.wcss_history.push_back(wcss);
        res.iterations = iter + 1;

        Matrix sums(std::size_t(k), d);
        std::vector<std::size_t> counts(std::size_t(k), 0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < d; ++j)
                sums(std::size_t(res.labels[i]), j) += X(i, j);
            ++counts[std::size_t(res.labels[i])];
        }
        for (int c = 0; c < k; ++c)
            for (std::size_t j = 0; j < d; ++j)
                centroids(std::size_t(c), j) =
                    sums(std::size_t(c), j) / double(counts[std::size_t(c)]);

        const bool converged = std::isfinite(prev) &&
                               (prev - wcss) <= options.tol * std::max(prev, 1e-300);
        prev = wcss;
        if (converged || wcss == 0.0) break;
    }
    res.wcss_history.push_back(assign_all());
    res.wcss = res.wcss_history.back();
    res.centroids = std::move(centroids);
    return res;
}

}  // namespace

KMeansResult kmeans(const Matrix& X, int k, std::uint64_t seed, const KMeansOptions& options) {
    KMeansResult best;
    best.wcss = std::numeric_limits<double>::infinity();
    for (int r = 0; r < options.restarts; ++r) {
        Rng rng(Rng::derive(seed, std::uint64_t(r)));
        Matrix init = seed_centroids(X, k, rng);
        KMeansResult res = lloyd_serial(X, std::move(init), options);
        res.best_restart = r;
        if (res.wcss < best.wcss) best = std::move(res);
    }
    return best;
}

double silhouette(const Matrix& X, std::span<const int> labels) {
    const std::size_t n = X.rows();
    int k = 0;
    for (int l : labels) k = std::max(k, l + 1);
    std::vector<std::size_t> sizes(std::size_t(k), 0);
    for (int l : labels) ++sizes[std::size_t(l)];

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (sizes[std::size_t(labels[i])] <= 1) continue;  // singleton scores 0
        double a = 0.0;
        double b = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
            if (sizes[std::size_t(c)] == 0) continue;
            double sum = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                if (labels[j] == c && j != i) sum += std::sqrt(sqdist(X.row(i), X.row(j)));
            if (c == labels[i]) a = sum / double(sizes[std::size_t(c)] - 1);
            else b = std::min(b, sum / double(sizes[std::size_t(c)]));
        }
        const double denom = std::max(a, b);
        if (denom > 0) total += (b - a) / denom;
    }
    return total / double(n);
}

double adjusted_rand_index_pairs(std::span<const int> a, std::span<const int> b) {
    const std::size_t n = a.size();
    double n11 = 0, n10 = 0, n01 = 0, n00 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool same_a = a[i] == a[j];
            const bool same_b = b[i] == b[j];
            if (same_a && same_b) ++n11;
            else if (same_a) ++n10;
            else if (same_b) ++n01;
            else ++n00;
        }
    }
    const double total = n11 + n10 + n01 + n00;
    const double expected = (n11 + n10) * (n11 + n01) / total;
    const double max_index = 0.5 * ((n11 + n10) + (n11 + n01));
    if (max_index == expected) return 1.0;
    return (n11 - expected) / (max_index - expected);
}

double pearson(std::span<const double> x, std::span<const double> y) {
    const double n = double(x.size());
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        syy += y[i] * y[i];
        sxy += x[i] * y[i];
    }
    const double num = n * sxy - sx * sy;
    const double den = std::sqrt(n * sxx - sx * sx) * std::sqrt(n * syy - sy * sy);
    return num / den;
}

double permutation_test(std::span<const double> x, std::span<const double> y, int n_perm,
                        std::uint64_t seed) {
    if (n_perm == 0) return 1.0;
    const double threshold = std::fabs(pearson(x, y));
    long long exceed = 0;
    for (int p = 0; p < n_perm; ++p) {
        Rng rng(Rng::derive(seed, std::uint64_t(p)));
        std::vector<double> perm(y.begin(), y.end());
        for (std::size_t i = perm.size() - 1; i > 0; --i) {
            const std::size_t j = std::size_t(rng.next_index(i + 1));
            std::swap(perm[i], perm[j]);
        }
        if (std::fabs(pearson(x, perm)) >= threshold) ++exceed;
    }
    return double(1 + exceed) / double(n_perm + 1);
}

ConsensusResult consensus(const Matrix& X, int k, std::uint64_t seed,
                          const ConsensusOptions& options) {
    const std::size_t n = X.rows();
    const std::size_t m = std::max<std::size_t>(
        std::size_t(k), std::size_t(std::floor(options.fraction * double(n))));
    std::vector<std::uint32_t> together(n * (n - 1) / 2, 0), sampled(n * (n - 1) / 2, 0);
    auto pair_index = [n](std::size_t i, std::size_t j) {
        return i * n - i * (i + 1) / 2 + (j - i - 1);
    };
    for (int r = 0; r < options.resamples; ++r) {
        Rng rng(Rng::derive(seed, 0xc0'0000 + std::uint64_t(r)));
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t j = i + std::size_t(rng.next_index(n - i));
            std::swap(idx[i], idx[j]);
        }
        idx.resize(m);
        std::sort(idx.begin(), idx.end());
        Matrix sub(m, X.cols());
        for (std::size_t i = 0; i < m; ++i)
            std::copy_n(X.row(idx[i]).begin(), X.cols(), sub.row(i).begin());
        KMeansResult km = reference::kmeans(sub, k, Rng::derive(seed, 0xc1'0000 + std::uint64_t(r)),
                                            options.kmeans);
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = a + 1; b < m; ++b) {
                const std::size_t pi = pair_index(idx[a], idx[b]);
                ++sampled[pi];
                if (km.labels[a] == km.labels[b]) ++together[pi];
            }
    }
    ConsensusResult result;
    result.n = int(n);
    result.matrix.resize(together.size());
    std::size_t ambiguous = 0, evaluated = 0;
    for (std::size_t p = 0; p < together.size(); ++p) {
        if (sampled[p] == 0) {
            result.matrix[p] = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        const double v = double(together[p]) / double(sampled[p]);
        result.matrix[p] = v;
        ++evaluated;
        if (v > options.pac_lower && v < options.pac_upper) ++ambiguous;
    }
    result.evaluated_pairs = evaluated;
    result.pac = evaluated ? double(ambiguous) / double(evaluated) : 0.0;
    return result;
}

std::vector<int> assignment_brute_force(const Matrix& cost, double* best_cost) {
    const std::size_t n = cost.rows();
    if (n > 10) throw DataError("brute-force assignment limited to n <= 10");
    std::vector<int> perm(n), best(n);
    std::iota(perm.begin(), perm.end(), 0);
    best = perm;
    double best_c = std::numeric_limits<double>::infinity();
    do {
        double c = 0.0;
        for (std::size_t i = 0; i < n; ++i) c += cost(i, std::size_t(perm[i]));
        if (c < best_c) {
            best_c = c;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (best_cost) *best_cost = best_c;
    return best;
}

}  // namespace painstates::reference
