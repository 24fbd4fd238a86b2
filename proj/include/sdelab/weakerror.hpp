#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sdelab/model.hpp"
#include "sdelab/scheme.hpp"

// Weak error experiments: |E g(X^n_T) - E g(X_T)| across step counts with
// common random numbers, compared against a logarithmic decay envelope
// C (log n)^(-nu/a), plus the running-max tail bound check for strict local
// martingale models.

namespace sdelab::weakerror {

struct FunctionalSpec {
    std::string name;
    std::function<double(double)> g;
    double sup_norm = 0.0;   // ||g||_inf
    double lipschitz = 0.0;  // global Lipschitz constant
};

// g(x) = min(hi, max(lo, x)); bounded with Lipschitz constant 1.
FunctionalSpec clamp_functional(double lo = -1.0, double hi = 1.0);

struct WeakErrorRow {
    std::size_t n = 0;
    double estimate = 0.0;  // |mean of g(X^n_T) - g(X^ref_T)|
    double se = 0.0;
    double bound = 0.0;     // C (log n)^(-nu/a)
};

struct WeakErrorReport {
    std::vector<WeakErrorRow> rows;
    double bound_constant = 0.0;    // C anchored at the smallest n
    double nu = 0.0;                // tail exponent used in the envelope
    double kappa = 0.0;             // tail scale: P(sup X > x) <~ kappa x^-nu
    double growth_exponent = 0.0;   // a from the model
    bool nonincreasing_ok = true;   // consecutive estimates within 2 SE
    bool bound_ok = true;           // estimates under the envelope within 2 SE
    bool noise_floor = false;       // every estimate below 3x its SE
    std::size_t paths = 0;
    std::size_t saturated_paths = 0;
    std::vector<double> sup_samples;  // running max of the reference per path
};

// Common random numbers: one fine path per path index drives the reference
// and every coarse scheme run.  Needs >= 1000 paths and dyadic strictly
// increasing step counts dividing refinement * max(ns).
WeakErrorReport estimate_weak_error(const model::Model& m, double x0,
                                    double horizon, const FunctionalSpec& g,
                                    const std::vector<std::size_t>& ns,
                                    std::size_t paths, std::size_t refinement,
                                    std::uint64_t seed, int workers);

struct TailCheckRow {
    double threshold = 0.0;
    double fraction = 0.0;  // empirical P(sup X > threshold)
    double ci_low = 0.0;    // Wilson 95%
    double ci_high = 0.0;
    double bound = 0.0;     // x0 / threshold
    bool pass = false;      // ci_low < bound
};

// Supremum tail bound check for nonnegative local martingale models:
// P(sup_{t<=T} X_t > x) <= x0/x.  Thresholds must exceed x0.
std::vector<TailCheckRow> tail_probability_check(
    const std::vector<double>& sup_samples, double x0,
    const std::vector<double>& thresholds);

}
