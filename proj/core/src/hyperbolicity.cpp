#include "gil/hyperbolicity.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "gil/error.hpp"
#include "gil/rng.hpp"

namespace gil::graphcore {

double gromov_delta(int d_xy, int d_zw, int d_xz, int d_yw, int d_xw, int d_yz) {
    const int ds[6] = {d_xy, d_zw, d_xz, d_yw, d_xw, d_yz};
    for (int d : ds) require(d >= 0 && d != kUnreachable, "gromov_delta: distances must be finite");
    double s[3] = {static_cast<double>(d_xy) + d_zw, static_cast<double>(d_xz) + d_yw,
                   static_cast<double>(d_xw) + d_yz};
    std::sort(s, s + 3);
    return (s[2] - s[1]) / 2.0;
}

std::map<double, double> DeltaHistogram::fractions() const {
    std::map<double, double> out;
    if (samples == 0) return out;
    for (const auto& [k, c] : counts) out[k] = static_cast<double>(c) / static_cast<double>(samples);
    return out;
}

DeltaHistogram hyperbolicity_distribution_exact(const Graph& g) {
    require(g.n >= 4, "hyperbolicity_distribution: need at least 4 nodes");
    if (g.n > kExactDeltaMaxNodes)
        throw ValidationError("exact hyperbolicity enumeration refused for n=" + std::to_string(g.n) +
                              " (> " + std::to_string(kExactDeltaMaxNodes) +
                              "); use sampled mode instead");
    require(is_connected(g), "hyperbolicity_distribution: graph must be connected");

    std::vector<std::vector<int>> dist(static_cast<size_t>(g.n));
    for (int i = 0; i < g.n; ++i) dist[static_cast<size_t>(i)] = bfs_distances(g, i);

    DeltaHistogram h;
    h.mode = DeltaMode::exact;
    for (int x = 0; x < g.n; ++x)
        for (int y = x + 1; y < g.n; ++y)
            for (int z = y + 1; z < g.n; ++z)
                for (int w = z + 1; w < g.n; ++w) {
                    const double d = gromov_delta(dist[x][y], dist[z][w], dist[x][z],
                                                  dist[y][w], dist[x][w], dist[y][z]);
                    ++h.counts[d];
                    ++h.samples;
                }
    return h;
}

DeltaHistogram hyperbolicity_distribution_sampled(const Graph& g, std::int64_t samples,
                                                  std::uint64_t seed) {
    require(g.n >= 4, "hyperbolicity_distribution: need at least 4 nodes");
    require(samples > 0, "hyperbolicity_distribution: sample count must be positive");

    // BFS rows are memoized; sampling touches at most n of them
    std::vector<std::vector<int>> cache(static_cast<size_t>(g.n));
    auto dist_row = [&](int u) -> const std::vector<int>& {
        auto& row = cache[static_cast<size_t>(u)];
        if (row.empty()) row = bfs_distances(g, u);
        return row;
    };

    Rng rng(seed);
    DeltaHistogram h;
    h.mode = DeltaMode::sampled;
    for (std::int64_t s = 0; s < samples; ++s) {
        int q[4];
        for (int k = 0; k < 4; ++k) {
            bool dup;
            do {
                q[k] = rng.uniform_int(0, g.n - 1);
                dup = false;
                for (int j = 0; j < k; ++j) dup = dup || q[j] == q[k];
            } while (dup);
        }
        const auto& dx = dist_row(q[0]);
        const auto& dy = dist_row(q[1]);
        const auto& dz = dist_row(q[2]);
        const int dxy = dx[static_cast<size_t>(q[1])], dxz = dx[static_cast<size_t>(q[2])],
                  dxw = dx[static_cast<size_t>(q[3])], dyz = dy[static_cast<size_t>(q[2])],
                  dyw = dy[static_cast<size_t>(q[3])], dzw = dz[static_cast<size_t>(q[3])];
        if (dxy == kUnreachable || dxz == kUnreachable || dxw == kUnreachable ||
            dyz == kUnreachable || dyw == kUnreachable || dzw == kUnreachable)
            continue;  // delta undefined across components
        ++h.counts[gromov_delta(dxy, dzw, dxz, dyw, dxw, dyz)];
        ++h.samples;
    }
    return h;
}

std::string format_delta_histogram(const DeltaHistogram& h, int nodes) {
    std::ostringstream out;
    out << "mode " << (h.mode == DeltaMode::exact ? "exact" : "sampled") << "\n";
    out << "samples " << h.samples << "\n";
    out << "nodes " << nodes << "\n";
    out.precision(10);
    out << std::fixed;
    for (const auto& [delta, frac] : h.fractions()) out << "delta " << delta << " " << frac << "\n";
    return out.str();
}

void write_delta_histogram(const DeltaHistogram& h, int nodes, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write file: " + path);
    out << format_delta_histogram(h, nodes);
}

}  // namespace gil::graphcore
