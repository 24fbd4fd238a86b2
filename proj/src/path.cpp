#include "sdelab/path.hpp"

#include <cmath>
#include <string>

#include "sdelab/errors.hpp"

namespace sdelab::path {

BrownianGrid generate_grid(std::uint64_t seed, std::uint64_t path_index,
                           double horizon, std::size_t n_fine) {
    if (!(horizon > 0.0))
        throw ConfigError("generate_grid: horizon must be positive, got " +
                          std::to_string(horizon));
    if (n_fine == 0)
        throw ConfigError("generate_grid: n_fine must be at least 1");

    BrownianGrid grid;
    grid.horizon = horizon;
    grid.seed = seed;
    grid.path_index = path_index;
    grid.increments.resize(n_fine);
    const double scale = std::sqrt(horizon / static_cast<double>(n_fine));
    for (std::size_t k = 0; k < n_fine; ++k)
        grid.increments[k] = scale * rng::normal(seed, path_index, k);
    return grid;
}

std::vector<double> coarsen_increments(std::vector<double> increments,
                                       std::size_t n_coarse) {
    const std::size_t n_fine = increments.size();
    if (n_coarse == 0 || n_fine % n_coarse != 0)
        throw ConfigError("coarsen: n_coarse " + std::to_string(n_coarse) +
                          " does not divide n_fine " + std::to_string(n_fine));
    std::size_t n = n_fine;
    while (n > n_coarse && n % 2 == 0 && (n / 2) % n_coarse == 0) {
        n /= 2;
        for (std::size_t j = 0; j < n; ++j)
            increments[j] = increments[2 * j] + increments[2 * j + 1];
        increments.resize(n);
    }
    if (n > n_coarse) {
        // Odd residual factor: plain left-to-right block sums.
        const std::size_t block = n / n_coarse;
        for (std::size_t j = 0; j < n_coarse; ++j) {
            double s = 0.0;
            for (std::size_t r = 0; r < block; ++r)
                s += increments[j * block + r];
            increments[j] = s;
        }
        increments.resize(n_coarse);
    }
    return increments;
}

std::vector<double> coarsen(const BrownianGrid& grid, std::size_t n_coarse) {
    return coarsen_increments(grid.increments, n_coarse);
}

std::vector<double> cumulative(const BrownianGrid& grid) {
    std::vector<double> w(grid.n_fine() + 1);
    w[0] = 0.0;
    for (std::size_t k = 0; k < grid.n_fine(); ++k)
        w[k + 1] = w[k] + grid.increments[k];
    return w;
}

std::size_t left_index(double t, std::size_t n, double horizon) {
    if (n == 0)
        throw ConfigError("left_index: n must be at least 1");
    if (!(horizon > 0.0) || t < 0.0 || t > horizon)
        throw ConfigError("left_index: t = " + std::to_string(t) +
                          " outside [0, " + std::to_string(horizon) + "]");
    const double s = t * static_cast<double>(n) / horizon;
    auto k = static_cast<std::size_t>(s);
    // Snap up when rounding left s just below an integer knot.
    if (s - static_cast<double>(k) > 1.0 - 1e-9 && k + 1 <= n)
        ++k;
    if (k > n) k = n;
    return k;
}

double grid_projection(double t, std::size_t n, double horizon) {
    return static_cast<double>(left_index(t, n, horizon)) * horizon /
           static_cast<double>(n);
}

}
