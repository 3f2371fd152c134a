#include "gil/splits.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "gil/error.hpp"
#include "gil/rng.hpp"

namespace gil::graphcore {

void SplitSpec::validate() const {
    require(train_frac > 0.0 && val_frac > 0.0 && test_frac > 0.0,
            "SplitSpec: fractions must be positive");
    require(std::abs(train_frac + val_frac + test_frac - 1.0) < 1e-9,
            "SplitSpec: fractions must sum to 1");
}

NodeSplit split_nodes(const Graph& g, const SplitSpec& spec) {
    spec.validate();
    require(g.has_labels(), "split_nodes: graph has no labels");

    const int nclass = g.num_classes();
    std::vector<std::vector<int>> by_class(static_cast<size_t>(nclass));
    for (int i = 0; i < g.n; ++i) {
        const int l = g.labels[static_cast<size_t>(i)];
        if (l >= 0) by_class[static_cast<size_t>(l)].push_back(i);
    }

    Rng rng(spec.seed);
    NodeSplit out;
    for (auto& members : by_class) {
        rng.shuffle(members);
        const auto count = static_cast<long long>(members.size());
        const long long ntrain = static_cast<long long>(std::floor(spec.train_frac * count + 1e-9));
        const long long nval = static_cast<long long>(std::floor(spec.val_frac * count + 1e-9));
        for (long long k = 0; k < count; ++k) {
            if (k < ntrain)
                out.train.push_back(members[static_cast<size_t>(k)]);
            else if (k < ntrain + nval)
                out.val.push_back(members[static_cast<size_t>(k)]);
            else
                out.test.push_back(members[static_cast<size_t>(k)]);
        }
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.val.begin(), out.val.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

EdgeSplit split_edges(const Graph& g, const SplitSpec& spec) {
    spec.validate();
    require(static_cast<int>(g.edges.size()) >= 20, "split_edges: need at least 20 edges");

    Rng rng(spec.seed);
    std::vector<std::pair<int, int>> shuffled = g.edges;
    rng.shuffle(shuffled);

    const auto m = static_cast<long long>(shuffled.size());
    const long long ntrain = static_cast<long long>(std::floor(spec.train_frac * m + 1e-9));
    const long long nval = static_cast<long long>(std::floor(spec.val_frac * m + 1e-9));

    EdgeSplit out;
    for (long long k = 0; k < m; ++k) {
        if (k < ntrain)
            out.train_pos.push_back(shuffled[static_cast<size_t>(k)]);
        else if (k < ntrain + nval)
            out.val_pos.push_back(shuffled[static_cast<size_t>(k)]);
        else
            out.test_pos.push_back(shuffled[static_cast<size_t>(k)]);
    }

    // negatives: uniform non-edges, rejected against true edges and earlier draws
    std::set<std::pair<int, int>> taken(g.edges.begin(), g.edges.end());
    auto sample_negatives = [&](size_t count, std::vector<std::pair<int, int>>& dst) {
        const double max_pairs = 0.5 * g.n * (g.n - 1);
        require(static_cast<double>(taken.size()) + count < 0.9 * max_pairs,
                "split_edges: graph too dense for disjoint negative sampling");
        while (dst.size() < count) {
            int u = rng.uniform_int(0, g.n - 1);
            int v = rng.uniform_int(0, g.n - 1);
            if (u == v) continue;
            std::pair<int, int> e{std::min(u, v), std::max(u, v)};
            if (taken.count(e)) continue;
            taken.insert(e);
            dst.push_back(e);
        }
    };
    sample_negatives(out.train_pos.size(), out.train_neg);
    sample_negatives(out.val_pos.size(), out.val_neg);
    sample_negatives(out.test_pos.size(), out.test_neg);

    out.train_graph = make_graph(g.n, out.train_pos, g.features, g.labels);
    return out;
}

}  // namespace gil::graphcore
