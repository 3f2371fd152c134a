#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "gil/graph.hpp"

namespace gil::graphcore {

/// Four-point Gromov delta of a quadruple from its six pairwise hop counts:
/// the three pairings' distance sums are formed and delta is half the gap
/// between the largest and the second largest.
double gromov_delta(int d_xy, int d_zw, int d_xz, int d_yw, int d_xw, int d_yz);

enum class DeltaMode { exact, sampled };

/// Distribution of gromov_delta over 4-node subsets. Keys are multiples of
/// 0.5 for unweighted graphs.
struct DeltaHistogram {
    std::map<double, std::int64_t> counts;
    std::int64_t samples = 0;
    DeltaMode mode = DeltaMode::exact;

    std::map<double, double> fractions() const;
};

/// Largest graph accepted by exact enumeration (O(n^4) quadruples).
inline constexpr int kExactDeltaMaxNodes = 300;

/// Histogram over all quadruples (exact) of a connected graph. Throws
/// ValidationError with sampling guidance when n > kExactDeltaMaxNodes.
DeltaHistogram hyperbolicity_distribution_exact(const Graph& g);

/// Histogram over `samples` uniformly drawn 4-node subsets. Quadruples
/// containing an unreachable pair are skipped (they do not count).
DeltaHistogram hyperbolicity_distribution_sampled(const Graph& g, std::int64_t samples,
                                                  std::uint64_t seed);

/// Key-value text document: mode, sample count, node count and one
/// "delta <value> <fraction>" line per bin in ascending delta order.
std::string format_delta_histogram(const DeltaHistogram& h, int nodes);
void write_delta_histogram(const DeltaHistogram& h, int nodes, const std::string& path);

}  // namespace gil::graphcore
