#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "painstates/clustering.hpp"
#include "painstates/matrix.hpp"

namespace painstates::reference {

/// Plain serial baselines, written independently of the OpenMP kernels. The
/// test suite checks the parallel implementations against these (bit-exact
/// where the arithmetic order matches), and the benchmark tool compares
/// their runtimes.

KMeansResult kmeans(const Matrix& X, int k, std::uint64_t seed, const KMeansOptions& options = {});

double silhouette(const Matrix& X, std::span<const int> labels);

/// Pair-counting adjusted Rand index, O(n^2); independent of the
/// contingency-table formula used by the production path.
double adjusted_rand_index_pairs(std::span<const int> a, std::span<const int> b);

double pearson(std::span<const double> x, std::span<const double> y);

double permutation_test(std::span<const double> x, std::span<const double> y, int n_perm,
                        std::uint64_t seed);

ConsensusResult consensus(const Matrix& X, int k, std::uint64_t seed,
                          const ConsensusOptions& options = {});

/// Exhaustive minimum-cost assignment (all permutations); n <= 10.
std::vector<int> assignment_brute_force(const Matrix& cost, double* best_cost = nullptr);

}  // namespace painstates::reference
