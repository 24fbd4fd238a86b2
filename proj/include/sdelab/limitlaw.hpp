#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "sdelab/model.hpp"
#include "sdelab/path.hpp"
#include "sdelab/scheme.hpp"

// Simulation of the error's limiting process
//   dU = mu'(X) U dt + sigma'(X) U dW + (sqrt(2)/2) sqrt(T) sigma(X) sigma'(X) dB,
// U_0 = 0, with B independent of the driving motion W, plus the sampling and
// moment diagnostics built on top of it.

namespace sdelab::limitlaw {

// Safeguard: when the reference state X leaves [-level, level] the pair
// (X, U) is frozen for the rest of the path.  Explosive models otherwise
// overflow doubles; the stopped values still dominate every sane threshold.
inline constexpr double kSimStopLevel = 1e6;

struct LimitTrajectory {
    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    double horizon = 0.0;
    std::size_t n_fine = 0;
    std::vector<double> u;      // n_fine + 1 values, u[0] == 0
    std::vector<double> x_ref;  // reference states driving the coefficients
    std::size_t stop_step = npos;

    bool stopped() const { return stop_step != npos; }
};

// Fine-grid Euler for U driven by the model's reference trajectory on w.
// w and b must share horizon and resolution and come from distinct streams.
LimitTrajectory simulate_limit(const model::Model& m, double x0,
                               const path::BrownianGrid& w,
                               const path::BrownianGrid& b);

// Paired samples for distribution comparisons: normalized terminal scheme
// errors sqrt(n)(X^n_T - X_T) on fresh paths, and limit-process samples
// (terminal value, checkpoint values, running max at checkpoints) on fresh
// independent (W, B) pairs.
struct ErrorLawSamples {
    std::vector<double> checkpoints;             // times, last one == horizon
    std::vector<double> scheme_un;               // may be empty (moments-only runs)
    std::vector<double> limit_terminal;
    std::vector<std::vector<double>> limit_at;   // [checkpoint][path]
    std::vector<std::vector<double>> limit_max;  // [checkpoint][path]
    std::size_t limit_stopped_paths = 0;
    std::size_t scheme_saturated_paths = 0;
};

ErrorLawSamples sample_error_law(const model::Model& m, double x0,
                                 double horizon, std::size_t n,
                                 std::size_t refinement, std::size_t paths,
                                 std::uint64_t seed, scheme::SchemeKind kind,
                                 const std::vector<double>& checkpoints,
                                 int workers, bool with_scheme_side);

struct CheckpointMoments {
    double t = 0.0;
    double mean = 0.0;
    double se_mean = 0.0;
    double m2 = 0.0;      // E[U_t^2]
    double se_m2 = 0.0;
    double m2_max = 0.0;  // E[(sup_{s<=t} |U_s|)^2]
    double se_m2_max = 0.0;
};

struct HeavyTail {
    bool estimated = false;
    double alpha = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t k = 0;
    bool infinite_variance = false;  // alpha < 2 and ci_high < 2.5
};

struct MomentReport {
    std::vector<CheckpointMoments> checkpoints;
    bool mean_zero_ok = false;          // |mean| <= 3 se at every checkpoint
    bool m2_le_m2_max = false;
    bool m2_max_nondecreasing = false;
    HeavyTail tail;                     // Hill on the top 5% of |U_T|
};

MomentReport moment_diagnostics(const ErrorLawSamples& samples);

// Resolution self check for the limit simulation: median coupled terminal
// gap between refinements n_fine and 2*n_fine must be at most half the
// median |U_T| (medians rather than RMS so heavy-tailed models are judged
// by their bulk, not by the largest excursion).
struct LimitLadderCheck {
    double gap_median = 0.0;
    double scale_median = 0.0;
    bool pass = false;
    std::size_t paths = 0;
};

LimitLadderCheck limit_ladder_check(const model::Model& m, double x0,
                                    double horizon, std::size_t n_fine,
                                    std::uint64_t seed, std::size_t paths,
                                    int workers);

}
