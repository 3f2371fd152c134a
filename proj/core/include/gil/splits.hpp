#pragma once

#include <cstdint>

#include "gil/graph.hpp"

namespace gil::graphcore {

enum class Task { node_classification, link_prediction };

struct SplitSpec {
    Task task = Task::node_classification;
    double train_frac = 0.30;
    double val_frac = 0.10;
    double test_frac = 0.60;
    std::uint64_t seed = 1;

    void validate() const;
};

/// Disjoint cover of the labeled nodes, stratified by class where counts
/// permit. Per class: floor(frac * count) to train and val, remainder to test.
struct NodeSplit {
    std::vector<int> train, val, test;
};
NodeSplit split_nodes(const Graph& g, const SplitSpec& spec);

/// Seeded partition of the edges plus one sampled negative (non-edge) per
/// positive, disjoint across splits and never a true edge of the full graph.
/// `train_graph` keeps only the train edges for message passing.
struct EdgeSplit {
    Graph train_graph;
    std::vector<std::pair<int, int>> train_pos, val_pos, test_pos;
    std::vector<std::pair<int, int>> train_neg, val_neg, test_neg;
};
EdgeSplit split_edges(const Graph& g, const SplitSpec& spec);

}  // namespace gil::graphcore
