// The OpenMP kernels must equal the plain serial reference at any thread
// count. Exact equality where the arithmetic order matches (kmeans,
// consensus); tight tolerances where accumulation order differs
// (silhouette); count tolerance where the statistic recomputation differs in
// the last ulp (permutation boundary cases).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "painstates/clustering.hpp"
#include "painstates/reference.hpp"
#include "painstates/stats.hpp"

using namespace painstates;
using testing::blobs;

TEST_CASE("kmeans: parallel restarts equal the serial reference bit for bit") {
    const Matrix centers{{0, 0, 0}, {4, 1, -2}, {-3, 5, 2}, {1, -4, 4}};
    const Matrix X = blobs(centers, 40, 0.7, 91);
    for (int k : {2, 3, 4, 6}) {
        const KMeansResult par = kmeans(X, k, 1234, {.restarts = 12});
        const KMeansResult ser = reference::kmeans(X, k, 1234, {.restarts = 12});
        CHECK(par.best_restart == ser.best_restart);
        CHECK(par.wcss == ser.wcss);
        CHECK(par.labels == ser.labels);
        CHECK(par.centroids == ser.centroids);
    }
}

TEST_CASE("silhouette: parallel matches the naive double loop") {
    const Matrix centers{{0, 0}, {5, 2}, {-3, 4}};
    std::vector<int> labels;
    const Matrix X = blobs(centers, 35, 0.9, 17, &labels);
    const double par = silhouette(X, labels);
    const double ser = reference::silhouette(X, labels);
    CHECK(par == doctest::Approx(ser).epsilon(1e-12));
}

TEST_CASE("consensus: parallel resamples equal the serial reference") {
    const Matrix centers{{0, 0}, {6, 6}};
    const Matrix X = blobs(centers, 30, 0.5, 7);
    ConsensusOptions options;
    options.resamples = 25;
    options.kmeans.restarts = 4;
    const ConsensusResult par = consensus(X, 2, 333, options);
    const ConsensusResult ser = reference::consensus(X, 2, 333, options);
    CHECK(par.pac == ser.pac);
    CHECK(par.evaluated_pairs == ser.evaluated_pairs);
    REQUIRE(par.matrix.size() == ser.matrix.size());
    for (std::size_t i = 0; i < par.matrix.size(); ++i) {
        if (std::isnan(par.matrix[i])) CHECK(std::isnan(ser.matrix[i]));
        else CHECK(par.matrix[i] == ser.matrix[i]);
    }
}

TEST_CASE("pearson: production matches the raw-sum formula") {
    Rng rng(3);
    std::vector<double> x(70), y(70);
    for (std::size_t i = 0; i < 70; ++i) {
        x[i] = rng.next_normal();
        y[i] = -0.4 * x[i] + 0.8 * rng.next_normal();
    }
    CHECK(correlate(x, y).r == doctest::Approx(reference::pearson(x, y)).epsilon(1e-12));
}

TEST_CASE("permutation test: parallel count equals the serial count") {
    Rng rng(29);
    std::vector<double> x(45), y(45);
    for (std::size_t i = 0; i < 45; ++i) {
        x[i] = rng.next_normal();
        y[i] = 0.25 * x[i] + rng.next_normal();
    }
    const double par = permutation_test(x, y, 4000, 17);
    const double ser = reference::permutation_test(x, y, 4000, 17);
    CHECK(std::fabs(par - ser) <= 2.0 / 4001.0);
}
