#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "painstates/clustering.hpp"
#include "painstates/common.hpp"

namespace painstates {

namespace {

struct Cluster {
    std::vector<double> centroid;
    std::size_t size = 0;
    std::size_t rep = 0;  // lowest original point index, for tie-breaking
    bool active = false;
};

// Ward's criterion: the increase in total within-cluster sum of squares when
// merging A and B.
inline double ward_distance(const Cluster& a, const Cluster& b) {
    double d2 = 0.0;
    for (std::size_t j = 0; j < a.centroid.size(); ++j) {
        const double diff = a.centroid[j] - b.centroid[j];
        d2 += diff * diff;
    }
    return (double(a.size) * double(b.size)) / double(a.size + b.size) * d2;
}

struct Merge {
    double height;
    std::size_t rep_a, rep_b;  // rep_a < rep_b
};

struct DisjointSet {
    std::vector<std::size_t> parent;
    explicit DisjointSet(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), std::size_t{0});
    }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

}  // namespace

std::vector<int> agglomerative_ward(const Matrix& X, int k) {
    const std::size_t n = X.rows();
    if (k < 1 || std::size_t(k) > n) throw DataError("agglomerative: k out of range");
    if (k == int(n)) {
        std::vector<int> labels(n);
        std::iota(labels.begin(), labels.end(), 0);
        return labels;
    }

    std::vector<Cluster> clusters;
    clusters.reserve(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        Cluster c;
        c.centroid.assign(X.row(i).begin(), X.row(i).end());
        c.size = 1;
        c.rep = i;
        c.active = true;
        clusters.push_back(std::move(c));
    }

    auto nearest = [&](std::size_t id) {
        double best_d = std::numeric_limits<double>::infinity();
        std::size_t best = id;
        for (std::size_t c = 0; c < clusters.size(); ++c) {
            if (!clusters[c].active || c == id) continue;
            const double d = ward_distance(clusters[id], clusters[c]);
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        return std::make_pair(best, best_d);
    };

    std::vector<Merge> merges;
    merges.reserve(n - 1);
    std::vector<std::size_t> chain;
    std::size_t lowest_unvisited = 0;
    while (merges.size() < n - 1) {
        if (chain.empty()) {
            while (!clusters[lowest_unvisited].active) ++lowest_unvisited;
            chain.push_back(lowest_unvisited);
        }
        const std::size_t top = chain.back();
        auto [nn, d] = nearest(top);
        if (chain.size() >= 2 && nn == chain[chain.size() - 2]) {
            chain.pop_back();
            chain.pop_back();
            Cluster& a = clusters[top];
            Cluster& b = clusters[nn];
            Merge m;
            m.height = d;
            m.rep_a = std::min(a.rep, b.rep);
            m.rep_b = std::max(a.rep, b.rep);
            merges.push_back(m);

            Cluster merged;
            merged.size = a.size + b.size;
            merged.rep = m.rep_a;
            merged.centroid.resize(a.centroid.size());
            for (std::size_t j = 0; j < a.centroid.size(); ++j)
                merged.centroid[j] = (double(a.size) * a.centroid[j] +
                                      double(b.size) * b.centroid[j]) /
                                     double(merged.size);
            merged.active = true;
            a.active = b.active = false;
            clusters.push_back(std::move(merged));
        } else {
            chain.push_back(nn);
        }
    }

    // The chain emits merges out of height order; sorting them (ties to the
    // lowest pair index) recovers the dendrogram, and the first n-k merges
    // give the k-cluster cut.
    std::sort(merges.begin(), merges.end(), [](const Merge& a, const Merge& b) {
        return std::tie(a.height, a.rep_a, a.rep_b) < std::tie(b.height, b.rep_a, b.rep_b);
    });
    DisjointSet ds(n);
    for (std::size_t m = 0; m < n - std::size_t(k); ++m) ds.unite(merges[m].rep_a, merges[m].rep_b);

    std::vector<int> labels(n, -1);
    std::vector<int> root_label(n, -1);
    int next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = ds.find(i);
        if (root_label[r] < 0) root_label[r] = next++;
        labels[i] = root_label[r];
    }
    if (next != k) throw InvariantError("agglomerative cut produced wrong cluster count");
    return labels;
}

}  // namespace painstates
