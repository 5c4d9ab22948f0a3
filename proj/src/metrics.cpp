#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "painstates/clustering.hpp"
#include "painstates/common.hpp"

namespace painstates {

double silhouette(const Matrix& X, std::span<const int> labels) {
    const std::size_t n = X.rows();
    if (labels.size() != n) throw DataError("labels length mismatch");
    int k = 0;
    for (int l : labels) {
        if (l < 0) throw DataError("negative cluster label");
        k = std::max(k, l + 1);
    }
    std::vector<std::size_t> sizes(std::size_t(k), 0);
    for (int l : labels) ++sizes[std::size_t(l)];
    const std::size_t nonempty = std::size_t(std::count_if(
        sizes.begin(), sizes.end(), [](std::size_t s) { return s > 0; }));
    if (nonempty < 2) throw DataError("silhouette is undefined for a single cluster");

    std::vector<double> s(n, 0.0);
#pragma omp parallel for schedule(static)
    for (long li = 0; li < long(n); ++li) {
        const std::size_t i = std::size_t(li);
        std::vector<double> sum(std::size_t(k), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            sum[std::size_t(labels[j])] += euclidean_distance(X.row(i), X.row(j));
        }
        const std::size_t own = std::size_t(labels[i]);
        if (sizes[own] <= 1) {
            s[i] = 0.0;  // singleton
            continue;
        }
        const double a = sum[own] / double(sizes[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
            if (std::size_t(c) == own || sizes[std::size_t(c)] == 0) continue;
            b = std::min(b, sum[std::size_t(c)] / double(sizes[std::size_t(c)]));
        }
        const double denom = std::max(a, b);
        s[i] = denom > 0.0 ? (b - a) / denom : 0.0;
    }

    double mean = 0.0;
    for (double v : s) mean += v;
    mean /= double(n);
    if (mean < -1.0 - 1e-12 || mean > 1.0 + 1e-12)
        throw InvariantError("silhouette out of [-1, 1]");
    return std::clamp(mean, -1.0, 1.0);
}

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
    if (a.size() != b.size()) throw DataError("label vectors differ in length");
    const std::size_t n = a.size();
    if (n < 2) throw DataError("ARI needs at least 2 points");

    std::map<std::pair<int, int>, double> contingency;
    std::map<int, double> row_sums, col_sums;
    for (std::size_t i = 0; i < n; ++i) {
        contingency[{a[i], b[i]}] += 1;
        row_sums[a[i]] += 1;
        col_sums[b[i]] += 1;
    }
    auto comb2 = [](double m) { return m * (m - 1.0) / 2.0; };
    double sum_cells = 0.0, sum_rows = 0.0, sum_cols = 0.0;
    for (const auto& [key, c] : contingency) sum_cells += comb2(c);
    for (const auto& [key, c] : row_sums) sum_rows += comb2(c);
    for (const auto& [key, c] : col_sums) sum_cols += comb2(c);
    const double total = comb2(double(n));
    const double expected = sum_rows * sum_cols / total;
    const double max_index = 0.5 * (sum_rows + sum_cols);
    if (max_index == expected) return 1.0;  // both labelings trivial
    return (sum_cells - expected) / (max_index - expected);
}

}  // namespace painstates
