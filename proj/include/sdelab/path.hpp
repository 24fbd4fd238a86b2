#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sdelab/rng.hpp"

// Brownian paths on a fine time grid, plus exact coarsening to coarser
// dyadic grids so that every discretization level of one experiment is
// driven by the same underlying path.

namespace sdelab::path {

// Key-space layout.  Distinct purposes draw from disjoint stream ranges so
// the driving motion W, the auxiliary motion B and synthetic benchmark
// draws are mutually independent by construction.
namespace stream {
inline constexpr std::uint64_t kSchemeW   = 0;
inline constexpr std::uint64_t kLimitW    = std::uint64_t{1} << 40;
inline constexpr std::uint64_t kSynthetic = std::uint64_t{1} << 62;
inline constexpr std::uint64_t kLimitB    = std::uint64_t{1} << 63;
}

struct BrownianGrid {
    double horizon = 0.0;            // T
    std::uint64_t seed = 0;
    std::uint64_t path_index = 0;    // stream id, see namespace stream
    std::vector<double> increments;  // n_fine Gaussian increments, var T/n_fine

    std::size_t n_fine() const { return increments.size(); }
    double step() const { return horizon / static_cast<double>(n_fine()); }
};

// Fresh path: increment k is sqrt(T/n_fine) * Phi^{-1}(u(seed, path_index, k)).
// Throws ConfigError on T <= 0 or n_fine == 0.
BrownianGrid generate_grid(std::uint64_t seed, std::uint64_t path_index,
                           double horizon, std::size_t n_fine);

// Coarse increments at level n_coarse (must divide n_fine).  Aggregation
// halves the grid repeatedly while the ratio is even, so for power-of-two
// ratios nested coarsening commutes bit-exactly with direct coarsening and
// each coarse increment is the pairwise sum of its block of fine increments.
std::vector<double> coarsen(const BrownianGrid& grid, std::size_t n_coarse);

// Same aggregation applied to a raw increment vector.
std::vector<double> coarsen_increments(std::vector<double> increments,
                                       std::size_t n_coarse);

// Left-to-right partial sums: W at grid times k*T/n_fine, size n_fine + 1,
// cumulative[0] == 0.
std::vector<double> cumulative(const BrownianGrid& grid);

// Index of the left grid point of t on the n-point grid over [0, T],
// i.e. floor(n*t/T), snapped to the nearest integer when t sits on a knot
// up to rounding.  Throws ConfigError for t outside [0, T].
std::size_t left_index(double t, std::size_t n, double horizon);

// The left grid time itself: left_index(t) * T / n.
double grid_projection(double t, std::size_t n, double horizon);

}
