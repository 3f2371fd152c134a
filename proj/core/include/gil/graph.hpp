#pragma once

#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gil/tensor.hpp"

namespace gil::graphcore {

/// Hop-count sentinel for nodes unreachable by BFS.
inline constexpr int kUnreachable = std::numeric_limits<int>::max();

/// Immutable undirected graph with per-node features and optional labels.
/// Edges are deduplicated, self-loop free and stored with endpoints (lo, hi);
/// adjacency lists are sorted. Label -1 marks an unlabeled node.
struct Graph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;
    std::vector<std::vector<int>> neighbors;
    Tensor features;          // n x F
    std::vector<int> labels;  // empty when absent, else size n

    bool has_labels() const { return !labels.empty(); }
    int feature_dim() const { return features.cols; }
    /// Number of classes = max label + 1 over labeled nodes (0 if none).
    int num_classes() const;
    bool has_edge(int u, int v) const;
};

/// Canonicalize raw edges (drop self-loops and duplicates) and build a Graph.
/// Endpoints must lie in [0, n); features must have n rows; labels, when
/// given, must have n entries.
Graph make_graph(int n, const std::vector<std::pair<int, int>>& raw_edges,
                 Tensor features, std::vector<int> labels = {});

/// Load a graph from the text formats:
///   edges    one "u v" pair of 0-based ids per line, '#' lines ignored;
///            self-loops are dropped with a warning on stderr
///   features one node per line, whitespace-separated decimal reals
///   labels   one integer class id per line, -1 = unlabeled
/// Node count comes from the feature file.
Graph load_graph(const std::string& edge_path, const std::string& feature_path,
                 const std::optional<std::string>& label_path = std::nullopt);

void save_edges(const Graph& g, const std::string& path);
void save_features(const Graph& g, const std::string& path);
void save_labels(const Graph& g, const std::string& path);

/// Exact unweighted shortest-path hop counts from `source` (kUnreachable
/// where no path exists).
std::vector<int> bfs_distances(const Graph& g, int source);

/// Induced subgraph of the largest connected component, nodes reindexed in
/// ascending original-id order, features/labels carried over. Ties break to
/// the component containing the smallest node id.
Graph max_connected_subgraph(const Graph& g);

bool is_connected(const Graph& g);

}  // namespace gil::graphcore
