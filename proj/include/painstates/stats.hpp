#pragma once

#include <cstdint>
#include <span>

namespace painstates {

struct Correlation {
    double r = 0.0;
    double p_parametric = 1.0;  // two-sided, t-distribution with n-2 dof
    std::size_t n = 0;
};

/// Pearson product-moment correlation. Throws DataError when n < 3 or either
/// vector is constant. p is clamped into (0, 1].
Correlation correlate(std::span<const double> x, std::span<const double> y);

/// Two-sided permutation p-value for |r|: shuffles y with seeded per-
/// permutation generators (schedule independent) and returns
/// (1 + #{|r*| >= |r|}) / (n_perm + 1).
double permutation_test(std::span<const double> x, std::span<const double> y, int n_perm,
                        std::uint64_t seed);

}  // namespace painstates
