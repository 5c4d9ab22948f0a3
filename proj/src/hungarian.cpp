#include <cmath>
#include <limits>
#include <vector>

#include "painstates/clustering.hpp"
#include "painstates/common.hpp"

namespace painstates {

// Hungarian algorithm with potentials, O(n^3). 1-based internals as in the
// classic formulation; p[j] is the row matched to column j.
std::vector<int> min_cost_assignment(const Matrix& cost) {
    if (cost.rows() != cost.cols()) throw DataError("assignment needs a square cost matrix");
    const int n = int(cost.rows());
    if (n == 0) return {};
    const double inf = std::numeric_limits<double>::infinity();

    std::vector<double> u(std::size_t(n) + 1, 0.0), v(std::size_t(n) + 1, 0.0);
    std::vector<int> p(std::size_t(n) + 1, 0), way(std::size_t(n) + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(std::size_t(n) + 1, inf);
        std::vector<char> used(std::size_t(n) + 1, 0);
        do {
            used[std::size_t(j0)] = 1;
            const int i0 = p[std::size_t(j0)];
            int j1 = -1;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[std::size_t(j)]) continue;
                const double cur =
                    cost(std::size_t(i0 - 1), std::size_t(j - 1)) - u[std::size_t(i0)] -
                    v[std::size_t(j)];
                if (cur < minv[std::size_t(j)]) {
                    minv[std::size_t(j)] = cur;
                    way[std::size_t(j)] = j0;
                }
                if (minv[std::size_t(j)] < delta) {
                    delta = minv[std::size_t(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[std::size_t(j)]) {
                    u[std::size_t(p[std::size_t(j)])] += delta;
                    v[std::size_t(j)] -= delta;
                } else {
                    minv[std::size_t(j)] -= delta;
                }
            }
            j0 = j1;
        } while (p[std::size_t(j0)] != 0);
        do {
            const int j1 = way[std::size_t(j0)];
            p[std::size_t(j0)] = p[std::size_t(j1)];
            j0 = j1;
        } while (j0);
    }

    std::vector<int> result(std::size_t(n), -1);
    for (int j = 1; j <= n; ++j)
        if (p[std::size_t(j)]) result[std::size_t(p[std::size_t(j)] - 1)] = j - 1;
    return result;
}

Alignment align_centroids(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DataError("centroid sets differ in shape; alignment across k is unsupported");
    const std::size_t k = a.rows();
    Matrix cost(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            cost(i, j) = euclidean_distance(a.row(i), b.row(j));

    Alignment out;
    out.mapping = min_cost_assignment(cost);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = std::size_t(out.mapping[i]);
        out.total_distance += cost(i, j);
        const double na = norm(a.row(i)), nb = norm(b.row(j));
        out.cosines.push_back(na > 0 && nb > 0 ? dot(a.row(i), b.row(j)) / (na * nb) : 0.0);
    }
    return out;
}

}  // namespace painstates
