#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "sdelab/model.hpp"
#include "sdelab/path.hpp"

// Discretization schemes on a coarse grid carved out of a fine Brownian
// grid, with continuous-time evaluation between knots and level stopping.

namespace sdelab::scheme {

enum class SchemeKind { euler, milstein, symmetrized_euler };

const char* scheme_name(SchemeKind kind);
SchemeKind scheme_from_name(const std::string& name);

// Once |state| exceeds this guard the path is frozen in place and flagged;
// it keeps IEEE overflow (inf/nan) out of downstream statistics while still
// registering as an exceedance of every reasonable threshold.
inline constexpr double kSaturationLevel = 1e150;

// Per-step cached coefficients for continuous evaluation between knots.
// ito_coeff = sigma*sigma'/2 and drift2_coeff = mu*mu'/2 are only nonzero
// for the Milstein scheme.
struct Anchor {
    double state = 0.0;
    double drift = 0.0;
    double diffusion = 0.0;
    double ito_coeff = 0.0;
    double drift2_coeff = 0.0;
};

struct Trajectory {
    SchemeKind scheme = SchemeKind::euler;
    std::string model_name;
    double horizon = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t path_index = 0;
    std::size_t n = 0;             // coarse step count
    std::vector<double> values;    // n+1 states at knots
    std::vector<Anchor> anchors;   // n entries
    bool saturated = false;

    double step() const { return horizon / static_cast<double>(n); }
};

// X_{k+1} = X_k + mu(X_k) h + sigma(X_k) dW_k.  Raises DomainError when a
// step leaves a positive-half-line model's domain (the message names the
// step and state) or produces a non-finite state.
Trajectory euler(const model::Model& m, double x0, const path::BrownianGrid& grid,
                 std::size_t n);

// Euler plus the corrections sigma*sigma'/2 [(dW)^2 - h] + mu*mu'/2 h^2.
Trajectory milstein(const model::Model& m, double x0,
                    const path::BrownianGrid& grid, std::size_t n);

// X_{k+1} = |X_k + mu(X_k) h + sigma(X_k) dW_k|.  Needs x0 > 0 and
// coefficients evaluable at 0; keeps the state nonnegative.
Trajectory symmetrized_euler(const model::Model& m, double x0,
                             const path::BrownianGrid& grid, std::size_t n);

Trajectory run_scheme(SchemeKind kind, const model::Model& m, double x0,
                      const path::BrownianGrid& grid, std::size_t n);

// Continuous-scheme value at a fine-grid time t: the anchored coefficients
// at the left coarse knot applied to (t - knot, W_t - W_knot).  At coarse
// knots this returns values[k] exactly.
double interpolate(const Trajectory& traj, double t,
                   const path::BrownianGrid& grid);

struct StoppedTrajectory {
    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    Trajectory base;               // values frozen from the stop index on
    double level = 0.0;
    std::size_t stop_index = npos; // first k with |values[k]| > level

    bool stopped() const { return stop_index != npos; }
};

// Freeze the trajectory at the first knot whose value strictly exceeds the
// level in magnitude.  Level must be positive.
StoppedTrajectory stop_at(const Trajectory& traj, double level);

}
