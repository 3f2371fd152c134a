#include <doctest.h>

#include <algorithm>
#include <set>

#include "gil/datasets.hpp"
#include "gil/error.hpp"
#include "gil/splits.hpp"

using namespace gil;
using namespace gil::graphcore;

namespace {

bool same_graph(const Graph& a, const Graph& b) {
    return a.n == b.n && a.edges == b.edges && a.labels == b.labels && a.features.v == b.features.v;
}

std::set<int> as_set(const std::vector<int>& xs) { return {xs.begin(), xs.end()}; }

}  // namespace

TEST_CASE("tree generator shape and determinism") {
    TreeOptions opt;
    opt.branching = 2;
    opt.depth = 5;
    Graph g = generate_tree_dataset(opt);
    CHECK(g.n == 63);
    CHECK(g.edges.size() == 62);
    CHECK(g.feature_dim() == opt.feature_dim);
    CHECK(g.num_classes() == 2);
    CHECK(g.labels[0] == 1);  // root starts the cascade

    Graph again = generate_tree_dataset(opt);
    CHECK(same_graph(g, again));
    opt.seed = 2;
    CHECK(!same_graph(g, generate_tree_dataset(opt)));

    opt.branching = 3;
    opt.depth = 6;
    opt.seed = 1;
    Graph big = generate_tree_dataset(opt);
    CHECK(big.n == 1093);
    CHECK(big.edges.size() == 1092);
}

TEST_CASE("tree label cascade only infects connected-to-root regions") {
    TreeOptions opt;
    opt.branching = 3;
    opt.depth = 5;
    opt.seed = 9;
    Graph g = generate_tree_dataset(opt);
    // an infected node's parent must be infected (cascade is top-down)
    for (int child = 1; child < g.n; ++child) {
        int parent = (child - 1) / opt.branching;
        if (g.labels[static_cast<size_t>(child)] == 1)
            CHECK(g.labels[static_cast<size_t>(parent)] == 1);
    }
}

TEST_CASE("grid generator shape and labels") {
    GridOptions opt;
    opt.rows = 4;
    opt.cols = 4;
    Graph g = generate_grid_dataset(opt);
    CHECK(g.n == 16);
    CHECK(g.edges.size() == 24);
    CHECK(g.num_classes() == 4);
    CHECK(g.labels[0] == 0);
    CHECK(g.labels[3] == 1);
    CHECK(g.labels[12] == 2);
    CHECK(g.labels[15] == 3);

    Graph again = generate_grid_dataset(opt);
    CHECK(same_graph(g, again));
}

TEST_CASE("generator input validation") {
    TreeOptions bad;
    bad.branching = 1;
    CHECK_THROWS_AS(generate_tree_dataset(bad), ContractViolation);
    GridOptions gb;
    gb.rows = 1;
    CHECK_THROWS_AS(generate_grid_dataset(gb), ContractViolation);
}

TEST_CASE("split_nodes produces exact sizes on balanced classes") {
    // 100 labeled nodes, two balanced classes, 30/10/60
    Tensor f(100, 1);
    std::vector<int> labels(100);
    for (int i = 0; i < 100; ++i) labels[static_cast<size_t>(i)] = i % 2;
    Graph g = make_graph(100, {}, f, labels);

    SplitSpec spec;
    spec.seed = 11;
    NodeSplit s = split_nodes(g, spec);
    CHECK(s.train.size() == 30);
    CHECK(s.val.size() == 10);
    CHECK(s.test.size() == 60);

    // airline-style 70/15/15: five balanced classes of 20
    Tensor f5(100, 1);
    std::vector<int> labels5(100);
    for (int i = 0; i < 100; ++i) labels5[static_cast<size_t>(i)] = i % 5;
    Graph g5 = make_graph(100, {}, f5, labels5);
    SplitSpec airport;
    airport.train_frac = 0.70;
    airport.val_frac = 0.15;
    airport.test_frac = 0.15;
    NodeSplit s2 = split_nodes(g5, airport);
    CHECK(s2.train.size() == 70);
    CHECK(s2.val.size() == 15);
    CHECK(s2.test.size() == 15);
}

TEST_CASE("split_nodes is stratified, disjoint, covering and deterministic") {
    Tensor f(60, 1);
    std::vector<int> labels(60);
    for (int i = 0; i < 60; ++i) labels[static_cast<size_t>(i)] = i < 40 ? 0 : (i < 55 ? 1 : -1);
    Graph g = make_graph(60, {}, f, labels);
    SplitSpec spec;
    spec.seed = 3;
    NodeSplit s = split_nodes(g, spec);

    auto train = as_set(s.train), val = as_set(s.val), test = as_set(s.test);
    CHECK(train.size() + val.size() + test.size() == 55);  // unlabeled excluded
    for (int i : val) CHECK(!train.count(i));
    for (int i : test) CHECK(!train.count(i));
    for (int i : test) CHECK(!val.count(i));
    for (int i : train) CHECK(g.labels[static_cast<size_t>(i)] >= 0);

    // stratified: class 0 (40 nodes) contributes floor(12)/floor(4)/24
    int c0_train = 0;
    for (int i : s.train) c0_train += g.labels[static_cast<size_t>(i)] == 0 ? 1 : 0;
    CHECK(c0_train == 12);

    NodeSplit s2 = split_nodes(g, spec);
    CHECK(s.train == s2.train);
    CHECK(s.val == s2.val);
    CHECK(s.test == s2.test);

    spec.seed = 4;
    NodeSplit s3 = split_nodes(g, spec);
    CHECK(s.train != s3.train);
}

TEST_CASE("split_nodes requires labels and valid fractions") {
    Graph unlabeled = make_graph(5, {}, Tensor(5, 1));
    SplitSpec spec;
    CHECK_THROWS_AS(split_nodes(unlabeled, spec), ContractViolation);

    Tensor f(10, 1);
    Graph g = make_graph(10, {}, f, std::vector<int>(10, 0));
    spec.train_frac = 0.5;
    spec.val_frac = 0.2;
    spec.test_frac = 0.2;  // sums to 0.9
    CHECK_THROWS_AS(split_nodes(g, spec), ContractViolation);
}

TEST_CASE("split_edges partitions and samples disjoint negatives") {
    TreeOptions opt;
    opt.branching = 2;
    opt.depth = 6;  // 127 nodes, 126 edges
    Graph g = generate_tree_dataset(opt);

    SplitSpec spec;
    spec.task = Task::link_prediction;
    spec.train_frac = 0.85;
    spec.val_frac = 0.05;
    spec.test_frac = 0.10;
    spec.seed = 21;
    EdgeSplit s = split_edges(g, spec);

    CHECK(s.train_pos.size() == 107);  // floor(0.85*126)
    CHECK(s.val_pos.size() == 6);      // floor(0.05*126)
    CHECK(s.test_pos.size() == 13);    // remainder
    CHECK(s.train_neg.size() == s.train_pos.size());
    CHECK(s.val_neg.size() == s.val_pos.size());
    CHECK(s.test_neg.size() == s.test_pos.size());

    // positives partition the edge set
    std::set<std::pair<int, int>> all(g.edges.begin(), g.edges.end());
    std::set<std::pair<int, int>> seen;
    for (const auto* part : {&s.train_pos, &s.val_pos, &s.test_pos})
        for (auto e : *part) {
            CHECK(all.count(e));
            CHECK(!seen.count(e));
            seen.insert(e);
        }
    CHECK(seen.size() == all.size());

    // negatives: never true edges, disjoint across splits
    std::set<std::pair<int, int>> negs;
    for (const auto* part : {&s.train_neg, &s.val_neg, &s.test_neg})
        for (auto e : *part) {
            CHECK(!all.count(e));
            CHECK(!negs.count(e));
            negs.insert(e);
        }

    // message passing graph holds exactly the train positives
    CHECK(s.train_graph.edges.size() == s.train_pos.size());
    CHECK(s.train_graph.n == g.n);

    EdgeSplit s2 = split_edges(g, spec);
    CHECK(s.train_pos == s2.train_pos);
    CHECK(s.test_neg == s2.test_neg);
}

TEST_CASE("split_edges wants 20 edges and 85/5/10 on round counts") {
    Tensor f(30, 1);
    std::vector<std::pair<int, int>> few = {{0, 1}, {1, 2}, {2, 3}};
    Graph small = make_graph(4, few, Tensor(4, 1));
    SplitSpec spec;
    spec.task = Task::link_prediction;
    spec.train_frac = 0.85;
    spec.val_frac = 0.05;
    spec.test_frac = 0.10;
    CHECK_THROWS_AS(split_edges(small, spec), ContractViolation);

    // an even 100-edge sparse graph: a 60-cycle plus 40 chords
    std::vector<std::pair<int, int>> e100;
    for (int i = 0; i < 60; ++i) e100.push_back({i, (i + 1) % 60});
    for (int i = 0; i < 40; ++i) e100.push_back({i, i + 7});
    Graph g100 = make_graph(60, e100, Tensor(60, 1));
    CHECK(g100.edges.size() == 100);
    EdgeSplit s = split_edges(g100, spec);
    CHECK(s.train_pos.size() == 85);
    CHECK(s.val_pos.size() == 5);
    CHECK(s.test_pos.size() == 10);
}
