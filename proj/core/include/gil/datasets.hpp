#pragma once

#include <cstdint>

#include "gil/graph.hpp"

namespace gil::graphcore {

enum class TreeLabelRule {
    sir_cascade,   // root infected; infection passes to each child with fixed probability
    depth_parity,  // label = depth mod 2
};

struct TreeOptions {
    int branching = 2;
    int depth = 5;
    int feature_dim = 8;
    TreeLabelRule label_rule = TreeLabelRule::sir_cascade;
    double infect_prob = 0.7;
    std::uint64_t seed = 1;
};

/// Balanced b-ary tree with (b^(depth+1) - 1) / (b - 1) nodes. Labels follow
/// the chosen rule; features are label-correlated Gaussians with the last
/// dimension carrying a noisy depth encoding.
Graph generate_tree_dataset(const TreeOptions& opt);

struct GridOptions {
    int rows = 4;
    int cols = 4;
    int feature_dim = 8;
    std::uint64_t seed = 1;
};

/// rows x cols lattice (4-regular interior). Labels are the four quadrants;
/// features are quadrant-correlated Gaussians with two noisy coordinate dims.
Graph generate_grid_dataset(const GridOptions& opt);

}  // namespace gil::graphcore
