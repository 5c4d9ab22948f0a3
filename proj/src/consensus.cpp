#include <algorithm>
#include <cmath>
#include <numeric>

#include "painstates/clustering.hpp"
#include "painstates/common.hpp"

namespace painstates {

double ConsensusResult::at(std::size_t i, std::size_t j) const {
    if (i == j) return 1.0;
    if (i > j) std::swap(i, j);
    // Row-major upper triangle offset for (i, j), i < j.
    const std::size_t un = std::size_t(n);
    const std::size_t idx = i * un - i * (i + 1) / 2 + (j - i - 1);
    return matrix[idx];
}

ConsensusResult consensus(const Matrix& X, int k, std::uint64_t seed,
                          const ConsensusOptions& options) {
    const std::size_t n = X.rows();
    if (n < 2) throw DataError("consensus needs at least 2 rows");
    if (!(options.fraction > 0.0 && options.fraction <= 1.0))
        throw ConfigError("consensus fraction must be in (0, 1]");
    if (options.resamples < 1) throw ConfigError("resamples must be >= 1");

    const std::size_t m = std::max<std::size_t>(
        std::size_t(k), std::size_t(std::floor(options.fraction * double(n))));
    if (m > n) throw ConfigError("subsample larger than data");

    struct Draw {
        std::vector<std::size_t> rows;
        std::vector<int> labels;
        bool failed = false;
    };
    std::vector<Draw> draws(std::size_t(options.resamples));

    // Each resample owns a derived seed, so the schedule cannot matter.
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < options.resamples; ++r) {
        Draw& draw = draws[std::size_t(r)];
        Rng rng(Rng::derive(seed, 0xc0'0000 + std::uint64_t(r)));
        // Partial Fisher-Yates: first m entries of a shuffled index vector.
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
        try {
            KMeansResult km =
                kmeans(sub, k, Rng::derive(seed, 0xc1'0000 + std::uint64_t(r)), options.kmeans);
            draw.rows = std::move(idx);
            draw.labels = std::move(km.labels);
        } catch (const DataError&) {
            draw.failed = true;  // subsample had < k distinct rows
        }
    }

    const std::size_t pairs = n * (n - 1) / 2;
    std::vector<std::uint32_t> together(pairs, 0), sampled(pairs, 0);
    auto pair_index = [n](std::size_t i, std::size_t j) {
        return i * n - i * (i + 1) / 2 + (j - i - 1);
    };
    // Serial accumulation in resample order keeps the result exact and
    // schedule independent.
    for (const Draw& draw : draws) {
        if (draw.failed) continue;
        for (std::size_t a = 0; a < draw.rows.size(); ++a) {
            for (std::size_t b = a + 1; b < draw.rows.size(); ++b) {
                const std::size_t idx = pair_index(draw.rows[a], draw.rows[b]);
                ++sampled[idx];
                if (draw.labels[a] == draw.labels[b]) ++together[idx];
            }
        }
    }

    ConsensusResult result;
    result.n = int(n);
    result.matrix.resize(pairs);
    std::size_t ambiguous = 0, evaluated = 0;
    for (std::size_t p = 0; p < pairs; ++p) {
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

}  // namespace painstates
