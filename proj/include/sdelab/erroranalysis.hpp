#pragma once

#include <cstddef>
#include <vector>

#include "sdelab/path.hpp"
#include "sdelab/reference.hpp"
#include "sdelab/scheme.hpp"
#include "sdelab/statkit.hpp"

// Pathwise discretization error measurements, the rescaled grid functionals
// that drive the error's limit law, and log-log rate fits.

namespace sdelab::erroranalysis {

struct ErrorSample {
    double sup_error = 0.0;            // sup over the fine grid of |scheme - ref|
    double terminal_error = 0.0;       // |X^n_T - X_T|
    double normalized_sup = 0.0;       // sqrt(n) * sup_error
    double normalized_terminal = 0.0;  // sqrt(n) * (X^n_T - X_T), signed
};

// Walks the fine grid once, evaluating the continuous scheme between knots
// with running (dt, dW) accumulators.  The trajectory and reference must
// come from the same path and grid.
ErrorSample error_sample(const scheme::Trajectory& traj,
                         const reference::ReferenceTrajectory& ref,
                         const path::BrownianGrid& grid);

// Rescaled grid functionals at the horizon for step count n:
//   z11 = int sqrt(n) (s - s_) ds         (trapezoid over the fine grid, exact
//                                          for the piecewise-linear sawtooth)
//   z12 = int sqrt(n) (s - s_) dW         (left-point Ito sum)
//   z21 = int sqrt(n) (W_s - W_s_) ds     (left-point Riemann sum)
//   z22 = int sqrt(n) (W_s - W_s_) dW     (exact per-step identity
//                                          sqrt(n)/2 * sum[(dW_k)^2 - h])
// where s_ is the left coarse knot of s.
struct ZStats {
    double z11 = 0.0;
    double z12 = 0.0;
    double z21 = 0.0;
    double z22 = 0.0;
};

ZStats z_functionals(const path::BrownianGrid& grid, std::size_t n);

// Exact value of z11 at the horizon: T^2 / (2 sqrt(n)).
double z11_closed_form(double horizon, std::size_t n);

struct RateFit {
    double alpha = 0.0;      // decay exponent: rms ~ c * n^-alpha
    double intercept = 0.0;  // log c
    double r2 = 0.0;
    double slope_se = 0.0;
};

// Log-log least squares on (n, rms).  Needs >= 3 strictly increasing n and
// positive rms values (zero rms means the measurement sits at noise floor).
RateFit fit_rate(const std::vector<std::size_t>& ns,
                 const std::vector<double>& rms_values);

}
