// Benchmark: OpenMP kernels vs the plain serial reference implementations.
// Also checks that both paths agree, since identical results at any thread
// count is a core guarantee of the toolkit.

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "painstates/clustering.hpp"
#include "painstates/common.hpp"
#include "painstates/reference.hpp"
#include "painstates/stats.hpp"

using namespace painstates;

namespace {

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

Matrix blob_data(std::size_t n, std::size_t d, int k, double spread, std::uint64_t seed) {
    Rng rng(seed);
    Matrix X(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        const int c = int(rng.next_index(std::uint64_t(k)));
        for (std::size_t j = 0; j < d; ++j)
            X(i, j) = double(c) + spread * rng.next_normal();
    }
    return X;
}

struct RowResult {
    double serial_ms, parallel_ms, diff;
};

void print_row(const std::string& name, const RowResult& r) {
    std::printf("%-22s %10.1f ms %10.1f ms %8.2fx   max|diff| %.3g\n", name.c_str(), r.serial_ms,
                r.parallel_ms, r.serial_ms / std::max(r.parallel_ms, 1e-9), r.diff);
}

}  // namespace

int main(int argc, char** argv) {
    std::size_t n = 4000;
    if (argc > 1) n = std::size_t(std::stoul(argv[1]));
    const std::uint64_t seed = 777;
    const Matrix X = blob_data(n, 7, 5, 0.35, seed);

    std::printf("n=%zu d=%zu, omp_max_threads=%d\n", X.rows(), X.cols(), omp_get_max_threads());
    std::printf("%-22s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");

    {
        const double t0 = now_ms();
        const KMeansResult serial = reference::kmeans(X, 5, seed, {.restarts = 20});
        const double t1 = now_ms();
        const KMeansResult parallel = kmeans(X, 5, seed, {.restarts = 20});
        const double t2 = now_ms();
        double diff = std::fabs(serial.wcss - parallel.wcss);
        for (std::size_t i = 0; i < X.rows(); ++i)
            if (serial.labels[i] != parallel.labels[i]) diff = std::max(diff, 1.0);
        print_row("kmeans (20 restarts)", {t1 - t0, t2 - t1, diff});
    }

    std::vector<int> labels;
    {
        labels = kmeans(X, 5, seed, {.restarts = 5}).labels;
        const double t0 = now_ms();
        const double s1 = reference::silhouette(X, labels);
        const double t1 = now_ms();
        const double s2 = silhouette(X, labels);
        const double t2 = now_ms();
        print_row("silhouette", {t1 - t0, t2 - t1, std::fabs(s1 - s2)});
    }

    {
        Rng rng(seed);
        std::vector<double> x(512), y(512);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = rng.next_normal();
            y[i] = 0.2 * x[i] + rng.next_normal();
        }
        const double t0 = now_ms();
        const double p1 = reference::permutation_test(x, y, 20000, seed);
        const double t1 = now_ms();
        const double p2 = permutation_test(x, y, 20000, seed);
        const double t2 = now_ms();
        print_row("permutation (20k)", {t1 - t0, t2 - t1, std::fabs(p1 - p2)});
    }

    {
        const Matrix sub = blob_data(std::min<std::size_t>(n, 1200), 7, 5, 0.35, seed);
        ConsensusOptions options;
        options.resamples = 40;
        const double t0 = now_ms();
        const ConsensusResult c1 = reference::consensus(sub, 5, seed, options);
        const double t1 = now_ms();
        const ConsensusResult c2 = consensus(sub, 5, seed, options);
        const double t2 = now_ms();
        print_row("consensus (40 draws)", {t1 - t0, t2 - t1, std::fabs(c1.pac - c2.pac)});
    }
    return 0;
}
