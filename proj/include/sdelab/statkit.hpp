#pragma once

#include <cstddef>
#include <vector>

// Small statistics toolkit: two-sample Kolmogorov-Smirnov distance, Hill
// tail-index estimator, least-squares line fits and moment summaries with
// jackknife standard errors.

namespace sdelab::statkit {

struct KsResult {
    double d = 0.0;            // sup |F_a - F_b|
    double critical_05 = 0.0;  // 1.358 * sqrt((m+n)/(m*n))
    bool pass = false;         // d < critical_05
    std::size_t m = 0;         // size of first sample
    std::size_t n = 0;         // size of second sample
};

// Exact empirical-CDF sup distance via a sorted merge.  Ties are handled by
// advancing through every equal value in both samples before measuring.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct HillEstimate {
    double alpha = 0.0;    // tail index estimate
    double ci_low = 0.0;   // alpha * (1 - 1.96/sqrt(k))
    double ci_high = 0.0;  // alpha * (1 + 1.96/sqrt(k))
    std::size_t k = 0;     // order statistics used
};

// Hill estimator on the k largest of the given positive samples:
// alpha = 1 / mean(log(X_(i) / X_(k+1))), i = 1..k, descending order stats.
// Requires k >= 10 and at least k+1 strictly positive samples.
HillEstimate hill_tail_index(std::vector<double> samples, std::size_t k);

struct LinFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double slope_se = 0.0;
};

// Ordinary least squares y = intercept + slope * x.  Needs >= 2 points and
// non-degenerate x.  A perfect fit (including constant y) reports r2 = 1.
LinFit linfit(const std::vector<double>& x, const std::vector<double>& y);

struct Summary {
    double mean = 0.0;
    double variance = 0.0;     // unbiased
    double se_mean = 0.0;      // sqrt(variance / count)
    double se_variance = 0.0;  // jackknife
    std::size_t count = 0;
};

Summary summarize(const std::vector<double>& values);

// Root mean square and its jackknife standard error.
double rms(const std::vector<double>& values);
double rms_jackknife_se(const std::vector<double>& values);

struct BinomialCi {
    double fraction = 0.0;
    double low = 0.0;
    double high = 0.0;
};

// Wilson score 95% interval for a binomial proportion.
BinomialCi wilson_interval(std::size_t successes, std::size_t trials);

// Median of a copy of the values (midpoint convention for even counts).
double median(std::vector<double> values);

}
