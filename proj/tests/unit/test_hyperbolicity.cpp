#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "gil/datasets.hpp"
#include "gil/error.hpp"
#include "gil/hyperbolicity.hpp"

using namespace gil;
using namespace gil::graphcore;

namespace {

Graph topology(int n, std::vector<std::pair<int, int>> edges) {
    return make_graph(n, edges, Tensor(n, 0));
}

Graph cycle(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i) e.push_back({i, (i + 1) % n});
    return topology(n, e);
}

Graph complete(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) e.push_back({i, j});
    return topology(n, e);
}

// ---- independent oracle: Floyd-Warshall distances + direct four-point delta
// over every quadruple, kept deliberately separate from the library path ----

std::vector<std::vector<int>> floyd_warshall(const Graph& g) {
    const int inf = 1 << 20;
    std::vector<std::vector<int>> d(static_cast<size_t>(g.n),
                                    std::vector<int>(static_cast<size_t>(g.n), inf));
    for (int i = 0; i < g.n; ++i) d[static_cast<size_t>(i)][static_cast<size_t>(i)] = 0;
    for (auto [u, v] : g.edges) {
        d[static_cast<size_t>(u)][static_cast<size_t>(v)] = 1;
        d[static_cast<size_t>(v)][static_cast<size_t>(u)] = 1;
    }
    for (int k = 0; k < g.n; ++k)
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j)
                d[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                    std::min(d[static_cast<size_t>(i)][static_cast<size_t>(j)],
                             d[static_cast<size_t>(i)][static_cast<size_t>(k)] +
                                 d[static_cast<size_t>(k)][static_cast<size_t>(j)]);
    return d;
}

std::map<double, std::int64_t> delta_counts_oracle(const Graph& g) {
    auto d = floyd_warshall(g);
    std::map<double, std::int64_t> counts;
    for (int x = 0; x < g.n; ++x)
        for (int y = x + 1; y < g.n; ++y)
            for (int z = y + 1; z < g.n; ++z)
                for (int w = z + 1; w < g.n; ++w) {
                    double sums[3] = {
                        static_cast<double>(d[x][y] + d[z][w]),
                        static_cast<double>(d[x][z] + d[y][w]),
                        static_cast<double>(d[x][w] + d[y][z]),
                    };
                    std::sort(sums, sums + 3);
                    ++counts[(sums[2] - sums[1]) / 2.0];
                }
    return counts;
}

}  // namespace

TEST_CASE("gromov_delta point cases") {
    // quadruple inside a complete graph: all six distances 1
    CHECK(gromov_delta(1, 1, 1, 1, 1, 1) == 0.0);
    // a tree quadruple: path 0-1-2-3 with x,y,z,w = 0,1,2,3
    CHECK(gromov_delta(1, 1, 2, 2, 3, 1) == 0.0);
    // four equally spaced nodes of C8 at 0,2,4,6
    CHECK(gromov_delta(2, 2, 4, 4, 2, 2) == 2.0);
    CHECK_THROWS_AS(gromov_delta(1, 1, 1, 1, 1, kUnreachable), ContractViolation);
    CHECK_THROWS_AS(gromov_delta(1, 1, -1, 1, 1, 1), ContractViolation);
}

TEST_CASE("exact distribution matches the brute-force oracle") {
    for (const Graph& g : {cycle(8), complete(8)}) {
        auto hist = hyperbolicity_distribution_exact(g);
        auto want = delta_counts_oracle(g);
        CHECK(hist.counts == want);
        std::int64_t total = 0;
        for (auto& [k, v] : want) total += v;
        CHECK(hist.samples == total);
    }
}

TEST_CASE("trees put all mass at zero") {
    TreeOptions opt;
    opt.branching = 2;
    opt.depth = 5;
    Graph tree = generate_tree_dataset(opt);
    auto hist = hyperbolicity_distribution_exact(tree);
    CHECK(hist.counts.size() == 1);
    CHECK(hist.counts.at(0.0) == hist.samples);
    CHECK(hist.fractions().at(0.0) == 1.0);
}

TEST_CASE("fractions sum to one") {
    auto hist = hyperbolicity_distribution_exact(cycle(9));
    double total = 0.0;
    for (auto& [k, v] : hist.fractions()) total += v;
    CHECK(std::abs(total - 1.0) < 1e-9);
    // unweighted graphs: keys are multiples of 0.5
    for (auto& [k, v] : hist.counts) CHECK(std::abs(k * 2.0 - std::round(k * 2.0)) == 0.0);
}

TEST_CASE("exact mode refuses oversized graphs") {
    TreeOptions opt;
    opt.branching = 2;
    opt.depth = 9;  // 1023 nodes, a disease-propagation-scale tree
    Graph big = generate_tree_dataset(opt);
    CHECK_THROWS_AS(hyperbolicity_distribution_exact(big), ValidationError);
    // the big tree still samples to a point mass at zero
    auto hist = hyperbolicity_distribution_sampled(big, 100000, 7);
    CHECK(hist.samples == 100000);
    CHECK(hist.fractions().at(0.0) == 1.0);
}

TEST_CASE("sampled agrees with exact in total variation") {
    // n <= 50 graph with a mixed delta spectrum
    Graph g = cycle(12);
    auto exact = hyperbolicity_distribution_exact(g).fractions();
    auto sampled = hyperbolicity_distribution_sampled(g, 100000, 3).fractions();
    double tv = 0.0;
    for (auto& [k, v] : exact) {
        auto it = sampled.find(k);
        tv += std::abs(v - (it == sampled.end() ? 0.0 : it->second));
    }
    for (auto& [k, v] : sampled)
        if (!exact.count(k)) tv += v;
    CHECK(tv / 2.0 < 0.02);
}

TEST_CASE("sampling is seed-deterministic") {
    Graph g = cycle(10);
    auto a = hyperbolicity_distribution_sampled(g, 5000, 42);
    auto b = hyperbolicity_distribution_sampled(g, 5000, 42);
    CHECK(a.counts == b.counts);
    auto c = hyperbolicity_distribution_sampled(g, 5000, 43);
    CHECK(a.counts != c.counts);
}

TEST_CASE("sampled mode skips cross-component quadruples") {
    // two K4s: any mixed quadruple has unreachable pairs and must be dropped
    std::vector<std::pair<int, int>> e;
    for (int base : {0, 4})
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) e.push_back({base + i, base + j});
    Graph g = topology(8, e);
    auto hist = hyperbolicity_distribution_sampled(g, 2000, 5);
    CHECK(hist.samples < 2000);
    CHECK(hist.samples > 0);
    CHECK(hist.fractions().at(0.0) == 1.0);
}

TEST_CASE("histogram text document") {
    auto hist = hyperbolicity_distribution_exact(complete(5));
    std::string doc = format_delta_histogram(hist, 5);
    CHECK(doc.find("mode exact") != std::string::npos);
    CHECK(doc.find("samples 5") != std::string::npos);
    CHECK(doc.find("delta 0.0000000000 1.0000000000") != std::string::npos);
}
