#include "gil/graph.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iostream>
#include <queue>
#include <set>
#include <sstream>

#include "gil/error.hpp"

namespace gil::graphcore {

int Graph::num_classes() const {
    int m = 0;
    for (int l : labels) m = std::max(m, l + 1);
    return m;
}

bool Graph::has_edge(int u, int v) const {
    if (u < 0 || u >= n || v < 0 || v >= n) return false;
    const auto& adj = neighbors[static_cast<size_t>(u)];
    return std::binary_search(adj.begin(), adj.end(), v);
}

Graph make_graph(int n, const std::vector<std::pair<int, int>>& raw_edges,
                 Tensor features, std::vector<int> labels) {
    require(n >= 0, "make_graph: negative node count");
    if (features.rows == 0 && features.cols == 0) features = Tensor(n, 0);
    if (features.rows != n)
        throw ValidationError("make_graph: feature row count " + std::to_string(features.rows) +
                              " does not match node count " + std::to_string(n));
    if (!labels.empty() && static_cast<int>(labels.size()) != n)
        throw ValidationError("make_graph: label count does not match node count");

    std::set<std::pair<int, int>> canon;
    for (auto [u, v] : raw_edges) {
        if (u < 0 || u >= n || v < 0 || v >= n)
            throw ValidationError("make_graph: edge endpoint out of range: " +
                                  std::to_string(u) + " " + std::to_string(v));
        if (u == v) continue;  // loaders warn; programmatic callers just get the drop
        canon.insert({std::min(u, v), std::max(u, v)});
    }

    Graph g;
    g.n = n;
    g.edges.assign(canon.begin(), canon.end());
    g.neighbors.assign(static_cast<size_t>(n), {});
    for (auto [u, v] : g.edges) {
        g.neighbors[static_cast<size_t>(u)].push_back(v);
        g.neighbors[static_cast<size_t>(v)].push_back(u);
    }
    for (auto& adj : g.neighbors) std::sort(adj.begin(), adj.end());
    g.features = std::move(features);
    g.labels = std::move(labels);
    return g;
}

namespace {

bool blank_or_comment(const std::string& line) {
    for (char ch : line) {
        if (ch == '#') return true;
        if (!std::isspace(static_cast<unsigned char>(ch))) return false;
    }
    return true;
}

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open file: " + path);
    return in;
}

}  // namespace

Graph load_graph(const std::string& edge_path, const std::string& feature_path,
                 const std::optional<std::string>& label_path) {
    // features define the node count
    std::vector<std::vector<double>> rows;
    {
        std::ifstream in = open_or_throw(feature_path);
        std::string line;
        long lineno = 0;
        size_t width = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (blank_or_comment(line)) continue;
            std::istringstream ss(line);
            std::vector<double> row;
            double x;
            while (ss >> x) row.push_back(x);
            if (!ss.eof()) throw ParseError(feature_path, lineno, "malformed feature value");
            if (row.empty()) throw ParseError(feature_path, lineno, "empty feature row");
            if (width == 0) width = row.size();
            if (row.size() != width)
                throw ParseError(feature_path, lineno,
                                 "feature row has " + std::to_string(row.size()) +
                                     " values, expected " + std::to_string(width));
            rows.push_back(std::move(row));
        }
    }
    const int n = static_cast<int>(rows.size());
    if (n == 0) throw ValidationError("feature file is empty: " + feature_path);
    Tensor features(n, static_cast<int>(rows[0].size()));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < features.cols; ++j) features.at(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];

    std::vector<std::pair<int, int>> edges;
    {
        std::ifstream in = open_or_throw(edge_path);
        std::string line;
        long lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (blank_or_comment(line)) continue;
            std::istringstream ss(line);
            long long u, v;
            if (!(ss >> u >> v)) throw ParseError(edge_path, lineno, "expected two integer node ids");
            std::string rest;
            if (ss >> rest) throw ParseError(edge_path, lineno, "trailing tokens after edge");
            if (u < 0 || v < 0) throw ParseError(edge_path, lineno, "negative node id");
            if (u >= n || v >= n)
                throw ValidationError(edge_path + ":" + std::to_string(lineno) +
                                      ": node id out of range (graph has " + std::to_string(n) +
                                      " nodes)");
            if (u == v) {
                std::cerr << "warning: " << edge_path << ":" << lineno << ": dropping self-loop "
                          << u << " " << v << "\n";
                continue;
            }
            edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
        }
    }

    std::vector<int> labels;
    if (label_path) {
        std::ifstream in = open_or_throw(*label_path);
        std::string line;
        long lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (blank_or_comment(line)) continue;
            std::istringstream ss(line);
            long long l;
            if (!(ss >> l)) throw ParseError(*label_path, lineno, "expected an integer class id");
            if (l < -1) throw ParseError(*label_path, lineno, "class id below -1");
            labels.push_back(static_cast<int>(l));
        }
        if (static_cast<int>(labels.size()) != n)
            throw ValidationError("label file has " + std::to_string(labels.size()) +
                                  " rows, expected " + std::to_string(n));
    }

    return make_graph(n, edges, std::move(features), std::move(labels));
}

void save_edges(const Graph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write file: " + path);
    for (auto [u, v] : g.edges) out << u << " " << v << "\n";
}

void save_features(const Graph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write file: " + path);
    out.precision(17);
    for (int i = 0; i < g.n; ++i) {
        for (int j = 0; j < g.features.cols; ++j) {
            if (j) out << " ";
            out << g.features.at(i, j);
        }
        out << "\n";
    }
}

void save_labels(const Graph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write file: " + path);
    for (int i = 0; i < g.n; ++i) out << (g.has_labels() ? g.labels[static_cast<size_t>(i)] : -1) << "\n";
}

std::vector<int> bfs_distances(const Graph& g, int source) {
    require(0 <= source && source < g.n, "bfs_distances: source out of range");
    std::vector<int> dist(static_cast<size_t>(g.n), kUnreachable);
    std::queue<int> q;
    dist[static_cast<size_t>(source)] = 0;
    q.push(source);
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (int v : g.neighbors[static_cast<size_t>(u)]) {
            if (dist[static_cast<size_t>(v)] != kUnreachable) continue;
            dist[static_cast<size_t>(v)] = dist[static_cast<size_t>(u)] + 1;
            q.push(v);
        }
    }
    return dist;
}

Graph max_connected_subgraph(const Graph& g) {
    require(g.n > 0, "max_connected_subgraph: empty graph");
    std::vector<int> comp(static_cast<size_t>(g.n), -1);
    int ncomp = 0;
    for (int s = 0; s < g.n; ++s) {
        if (comp[static_cast<size_t>(s)] != -1) continue;
        std::queue<int> q;
        comp[static_cast<size_t>(s)] = ncomp;
        q.push(s);
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (int v : g.neighbors[static_cast<size_t>(u)])
                if (comp[static_cast<size_t>(v)] == -1) {
                    comp[static_cast<size_t>(v)] = ncomp;
                    q.push(v);
                }
        }
        ++ncomp;
    }
    std::vector<int> size(static_cast<size_t>(ncomp), 0);
    for (int c : comp) ++size[static_cast<size_t>(c)];
    // components are discovered in ascending smallest-id order, so the first
    // maximal one wins ties
    int best = 0;
    for (int c = 1; c < ncomp; ++c)
        if (size[static_cast<size_t>(c)] > size[static_cast<size_t>(best)]) best = c;

    std::vector<int> old_ids;
    std::vector<int> remap(static_cast<size_t>(g.n), -1);
    for (int i = 0; i < g.n; ++i)
        if (comp[static_cast<size_t>(i)] == best) {
            remap[static_cast<size_t>(i)] = static_cast<int>(old_ids.size());
            old_ids.push_back(i);
        }

    std::vector<std::pair<int, int>> edges;
    for (auto [u, v] : g.edges)
        if (comp[static_cast<size_t>(u)] == best)
            edges.emplace_back(remap[static_cast<size_t>(u)], remap[static_cast<size_t>(v)]);

    Tensor features(static_cast<int>(old_ids.size()), g.features.cols);
    for (size_t i = 0; i < old_ids.size(); ++i)
        for (int j = 0; j < g.features.cols; ++j)
            features.at(static_cast<int>(i), j) = g.features.at(old_ids[i], j);

    std::vector<int> labels;
    if (g.has_labels()) {
        labels.reserve(old_ids.size());
        for (int id : old_ids) labels.push_back(g.labels[static_cast<size_t>(id)]);
    }
    return make_graph(static_cast<int>(old_ids.size()), edges, std::move(features), std::move(labels));
}

bool is_connected(const Graph& g) {
    if (g.n == 0) return true;
    auto d = bfs_distances(g, 0);
    for (int x : d)
        if (x == kUnreachable) return false;
    return true;
}

}  // namespace gil::graphcore
