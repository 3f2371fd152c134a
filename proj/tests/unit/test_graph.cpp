#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "gil/error.hpp"
#include "gil/graph.hpp"

using namespace gil;
using namespace gil::graphcore;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& content)
        : path("/tmp/gil_test_" + name) {
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

Tensor unit_features(int n) {
    Tensor f(n, 1);
    for (int i = 0; i < n; ++i) f.at(i, 0) = 1.0;
    return f;
}

}  // namespace

TEST_CASE("make_graph deduplicates and sorts") {
    auto g = make_graph(3, {{0, 1}, {1, 0}, {1, 2}, {0, 1}}, unit_features(3));
    CHECK(g.edges.size() == 2);
    CHECK(g.neighbors[1] == std::vector<int>{0, 2});
    CHECK(g.has_edge(1, 0));
    CHECK(!g.has_edge(0, 2));
}

TEST_CASE("make_graph validates") {
    CHECK_THROWS_AS(make_graph(2, {{0, 5}}, unit_features(2)), ValidationError);
    CHECK_THROWS_AS(make_graph(3, {}, unit_features(2)), ValidationError);
    CHECK_THROWS_AS(make_graph(2, {}, unit_features(2), {0}), ValidationError);
}

TEST_CASE("load_graph parses the text formats") {
    TempFile edges("g1.edges", "0 1\n1 2\n0 1\n# comment\n");
    TempFile feats("g1.features", "1.0 2.0\n3.0 4.0\n5.0 6.0\n");
    TempFile labels("g1.labels", "0\n1\n-1\n");
    Graph g = load_graph(edges.path, feats.path, labels.path);
    CHECK(g.n == 3);
    CHECK(g.edges.size() == 2);  // duplicate collapsed
    CHECK(g.features.at(1, 1) == 4.0);
    CHECK(g.labels == std::vector<int>{0, 1, -1});
    CHECK(g.num_classes() == 2);
}

TEST_CASE("load_graph drops self-loops with a warning") {
    TempFile edges("g2.edges", "0 1\n2 2\n");
    TempFile feats("g2.features", "1\n1\n1\n");
    Graph g = load_graph(edges.path, feats.path);
    CHECK(g.edges.size() == 1);
}

TEST_CASE("load_graph error paths") {
    TempFile feats("g3.features", "1 2\n3 4\n");
    {
        TempFile edges("g3.edges", "0 5\n");
        CHECK_THROWS_AS(load_graph(edges.path, feats.path), ValidationError);
    }
    {
        TempFile edges("g3b.edges", "0 x\n");
        CHECK_THROWS_AS(load_graph(edges.path, feats.path), ParseError);
    }
    {
        TempFile edges("g3c.edges", "0 1\n");
        TempFile labels("g3c.labels", "0\n");  // wrong row count
        CHECK_THROWS_AS(load_graph(edges.path, feats.path, labels.path), ValidationError);
    }
    {
        TempFile edges("g3d.edges", "0 1\n");
        TempFile ragged("g3d.features", "1 2\n3\n");
        CHECK_THROWS_AS(load_graph(edges.path, ragged.path), ParseError);
    }
    CHECK_THROWS_AS(load_graph("/nonexistent/file", feats.path), ValidationError);
}

TEST_CASE("parse errors carry line numbers") {
    TempFile feats("g4.features", "1\n1\n");
    TempFile edges("g4.edges", "0 1\nbroken line\n");
    try {
        load_graph(edges.path, feats.path);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line_number == 2);
        CHECK(std::string(e.what()).find(":2:") != std::string::npos);
    }
}

TEST_CASE("bfs_distances") {
    auto path3 = make_graph(3, {{0, 1}, {1, 2}}, unit_features(3));
    CHECK(bfs_distances(path3, 0) == std::vector<int>{0, 1, 2});

    auto lonely = make_graph(3, {{0, 1}}, unit_features(3));
    auto d = bfs_distances(lonely, 0);
    CHECK(d[2] == kUnreachable);

    // complete graph K5
    std::vector<std::pair<int, int>> k5;
    for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j) k5.push_back({i, j});
    auto k5g = make_graph(5, k5, unit_features(5));
    auto dk = bfs_distances(k5g, 2);
    for (int i = 0; i < 5; ++i) CHECK(dk[static_cast<size_t>(i)] == (i == 2 ? 0 : 1));

    CHECK_THROWS_AS(bfs_distances(path3, 9), ContractViolation);
}

TEST_CASE("max_connected_subgraph keeps the largest component") {
    // components {0..6} (path) and {7,8,9} (triangle)
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < 6; ++i) edges.push_back({i, i + 1});
    edges.push_back({7, 8});
    edges.push_back({8, 9});
    edges.push_back({7, 9});
    Tensor f(10, 2);
    for (int i = 0; i < 10; ++i) f.at(i, 0) = i;
    std::vector<int> labels(10);
    for (int i = 0; i < 10; ++i) labels[static_cast<size_t>(i)] = i % 2;

    Graph g = make_graph(10, edges, f, labels);
    Graph big = max_connected_subgraph(g);
    CHECK(big.n == 7);
    CHECK(big.edges.size() == 6);
    CHECK(big.features.at(3, 0) == 3.0);  // carried, reindexed in original order
    CHECK(big.labels[5] == 1);

    Graph connected = max_connected_subgraph(big);
    CHECK(connected.n == big.n);

    // no edges: single node, smallest id wins the tie
    Graph none = max_connected_subgraph(make_graph(4, {}, unit_features(4)));
    CHECK(none.n == 1);
    CHECK(none.features.at(0, 0) == 1.0);
}

TEST_CASE("save and reload round-trips") {
    Tensor f(3, 2);
    f.at(0, 0) = 0.25;
    f.at(2, 1) = -1.5;
    Graph g = make_graph(3, {{0, 2}, {1, 2}}, f, {1, 0, -1});
    save_edges(g, "/tmp/gil_test_rt.edges");
    save_features(g, "/tmp/gil_test_rt.features");
    save_labels(g, "/tmp/gil_test_rt.labels");
    Graph back = load_graph("/tmp/gil_test_rt.edges", "/tmp/gil_test_rt.features",
                            std::string("/tmp/gil_test_rt.labels"));
    CHECK(back.n == 3);
    CHECK(back.edges == g.edges);
    CHECK(back.features.at(0, 0) == 0.25);
    CHECK(back.features.at(2, 1) == -1.5);
    CHECK(back.labels == g.labels);
    std::remove("/tmp/gil_test_rt.edges");
    std::remove("/tmp/gil_test_rt.features");
    std::remove("/tmp/gil_test_rt.labels");
}
