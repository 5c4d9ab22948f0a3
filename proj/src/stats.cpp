#include "painstates/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "painstates/common.hpp"

namespace painstates {

namespace {

struct Moments {
    double mean_x, mean_y, sd_x, sd_y;
};

Moments moments(std::span<const double> x, std::span<const double> y) {
    const double n = double(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double vx = 0, vy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        vx += (x[i] - mx) * (x[i] - mx);
        vy += (y[i] - my) * (y[i] - my);
    }
    return {mx, my, std::sqrt(vx), std::sqrt(vy)};
}

double pearson_from(std::span<const double> x, std::span<const double> y, const Moments& m) {
    double cov = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) cov += (x[i] - m.mean_x) * (y[i] - m.mean_y);
    return cov / (m.sd_x * m.sd_y);
}

}  // namespace

Correlation correlate(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DataError("correlate: length mismatch");
    if (x.size() < 3) throw DataError("correlate: need at least 3 pairs");
    const Moments m = moments(x, y);
    if (m.sd_x == 0.0 || m.sd_y == 0.0)
        throw DataError("correlate: constant input, correlation undefined");

    Correlation out;
    out.n = x.size();
    out.r = std::clamp(pearson_from(x, y, m), -1.0, 1.0);

    const double dof = double(out.n - 2);
    const double denom = 1.0 - out.r * out.r;
    if (denom <= 0.0) {
        out.p_parametric = std::numeric_limits<double>::min();
        return out;
    }
    const double t = std::fabs(out.r) * std::sqrt(dof / denom);
    boost::math::students_t_distribution<double> dist(dof);
    const double p = 2.0 * boost::math::cdf(boost::math::complement(dist, t));
    out.p_parametric = std::clamp(p, std::numeric_limits<double>::min(), 1.0);
    return out;
}

double permutation_test(std::span<const double> x, std::span<const double> y, int n_perm,
                        std::uint64_t seed) {
    if (n_perm < 0) throw ConfigError("n_perm must be >= 0");
    const Correlation obs = correlate(x, y);
    if (n_perm == 0) return 1.0;
    const Moments m = moments(x, y);
    const double threshold = std::fabs(obs.r);

    // Means and variances are permutation invariant, so each permuted r is
    // just a re-ordered cross moment.
    long long exceed = 0;
#pragma omp parallel for schedule(static) reduction(+ : exceed)
    for (int p = 0; p < n_perm; ++p) {
        Rng rng(Rng::derive(seed, std::uint64_t(p)));
        std::vector<double> perm(y.begin(), y.end());
        for (std::size_t i = perm.size() - 1; i > 0; --i) {
            const std::size_t j = std::size_t(rng.next_index(i + 1));
            std::swap(perm[i], perm[j]);
        }
        const double r = pearson_from(x, perm, m);
        if (std::fabs(r) >= threshold) ++exceed;
    }
    return double(1 + exceed) / double(n_perm + 1);
}

}  // namespace painstates
