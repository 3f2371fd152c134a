#include "gil/datasets.hpp"

#include <cmath>
#include <vector>

#include "gil/error.hpp"
#include "gil/rng.hpp"

namespace gil::graphcore {

Graph generate_tree_dataset(const TreeOptions& opt) {
    require(opt.branching >= 2, "generate_tree_dataset: branching must be >= 2");
    require(opt.depth >= 1, "generate_tree_dataset: depth must be >= 1");
    require(opt.feature_dim >= 4, "generate_tree_dataset: feature_dim must be >= 4");
    require(opt.infect_prob > 0.0 && opt.infect_prob <= 1.0,
            "generate_tree_dataset: infect_prob must be in (0, 1]");

    std::int64_t n64 = 0, level = 1;
    for (int d = 0; d <= opt.depth; ++d) {
        n64 += level;
        level *= opt.branching;
    }
    require(n64 <= 2'000'000, "generate_tree_dataset: tree too large");
    const int n = static_cast<int>(n64);

    std::vector<std::pair<int, int>> edges;
    std::vector<int> depth(static_cast<size_t>(n), 0);
    edges.reserve(static_cast<size_t>(n) - 1);
    // breadth-first numbering: children of i are b*i+1 ... b*i+b
    for (int child = 1; child < n; ++child) {
        int parent = (child - 1) / opt.branching;
        edges.emplace_back(parent, child);
        depth[static_cast<size_t>(child)] = depth[static_cast<size_t>(parent)] + 1;
    }

    Rng rng(opt.seed);
    std::vector<int> labels(static_cast<size_t>(n), 0);
    if (opt.label_rule == TreeLabelRule::sir_cascade) {
        labels[0] = 1;
        for (int child = 1; child < n; ++child) {
            int parent = (child - 1) / opt.branching;
            labels[static_cast<size_t>(child)] =
                labels[static_cast<size_t>(parent)] == 1 && rng.bernoulli(opt.infect_prob) ? 1 : 0;
        }
    } else {
        for (int i = 0; i < n; ++i) labels[static_cast<size_t>(i)] = depth[static_cast<size_t>(i)] % 2;
    }

    // Feature layout: [0, F-2) Gaussians whose means diffuse down the tree (a
    // per-child random-walk step, mimicking propagation state), with the walk
    // drifting by label; F-2 a noisy label channel; F-1 a noisy depth encoding.
    // The diffusing means are what lets a held-out tree edge be scored from
    // features alone; depth and label by themselves leave removed edges
    // indistinguishable from random pairs.
    const int fdim = opt.feature_dim;
    const int walk_dims = fdim - 2;
    const double step_sigma = 1.0;
    const double obs_sigma = 0.1;
    Tensor drift = rng.uniform_tensor(1, walk_dims, -0.4, 0.4);  // label-1 drift direction
    Tensor walk(n, walk_dims);
    for (int child = 1; child < n; ++child) {
        int parent = (child - 1) / opt.branching;
        for (int j = 0; j < walk_dims; ++j)
            walk.at(child, j) = walk.at(parent, j) + rng.normal(0.0, step_sigma) +
                                (labels[static_cast<size_t>(child)] == 1 ? drift.at(0, j) : 0.0);
    }
    Tensor features(n, fdim);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < walk_dims; ++j)
            features.at(i, j) = walk.at(i, j) + rng.normal(0.0, obs_sigma);
        features.at(i, fdim - 2) =
            (labels[static_cast<size_t>(i)] == 1 ? 1.0 : -1.0) + rng.normal(0.0, 0.8);
        features.at(i, fdim - 1) =
            static_cast<double>(depth[static_cast<size_t>(i)]) / (opt.depth + 1) + rng.normal(0.0, 0.05);
    }

    return make_graph(n, edges, std::move(features), std::move(labels));
}

Graph generate_grid_dataset(const GridOptions& opt) {
    require(opt.rows >= 2 && opt.cols >= 2, "generate_grid_dataset: rows and cols must be >= 2");
    require(opt.feature_dim >= 3, "generate_grid_dataset: feature_dim must be >= 3");
    const int n = opt.rows * opt.cols;

    std::vector<std::pair<int, int>> edges;
    auto id = [&](int r, int c) { return r * opt.cols + c; };
    for (int r = 0; r < opt.rows; ++r)
        for (int c = 0; c < opt.cols; ++c) {
            if (c + 1 < opt.cols) edges.emplace_back(id(r, c), id(r, c + 1));
            if (r + 1 < opt.rows) edges.emplace_back(id(r, c), id(r + 1, c));
        }

    Rng rng(opt.seed);
    std::vector<int> labels(static_cast<size_t>(n));
    for (int r = 0; r < opt.rows; ++r)
        for (int c = 0; c < opt.cols; ++c)
            labels[static_cast<size_t>(id(r, c))] = (r >= opt.rows / 2 ? 2 : 0) + (c >= opt.cols / 2 ? 1 : 0);

    const int fdim = opt.feature_dim;
    std::vector<Tensor> means;
    means.reserve(4);
    for (int q = 0; q < 4; ++q) means.push_back(rng.uniform_tensor(1, fdim - 2, -1.0, 1.0));

    Tensor features(n, fdim);
    for (int r = 0; r < opt.rows; ++r)
        for (int c = 0; c < opt.cols; ++c) {
            const int i = id(r, c);
            const Tensor& mu = means[static_cast<size_t>(labels[static_cast<size_t>(i)])];
            for (int j = 0; j < fdim - 2; ++j) features.at(i, j) = mu.at(0, j) + rng.normal(0.0, 1.0);
            features.at(i, fdim - 2) = static_cast<double>(r) / (opt.rows - 1) + rng.normal(0.0, 0.05);
            features.at(i, fdim - 1) = static_cast<double>(c) / (opt.cols - 1) + rng.normal(0.0, 0.05);
        }

    return make_graph(n, edges, std::move(features), std::move(labels));
}

}  // namespace gil::graphcore
