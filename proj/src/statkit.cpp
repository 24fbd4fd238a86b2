#include "sdelab/statkit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sdelab/errors.hpp"

namespace sdelab::statkit {

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty())
        throw ConfigError("ks_two_sample: both samples must be non-empty");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());

    KsResult res;
    res.m = a.size();
    res.n = b.size();
    const double m = static_cast<double>(res.m);
    const double n = static_cast<double>(res.n);

    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < res.m && j < res.n) {
        const double v = std::min(a[i], b[j]);
        while (i < res.m && a[i] == v) ++i;
        while (j < res.n && b[j] == v) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / m -
                                  static_cast<double>(j) / n));
    }
    res.d = d;
    res.critical_05 = 1.358 * std::sqrt((m + n) / (m * n));
    res.pass = res.d < res.critical_05;
    return res;
}

HillEstimate hill_tail_index(std::vector<double> samples, std::size_t k) {
    if (k < 10)
        throw ConfigError("hill_tail_index: k must be at least 10, got " +
                          std::to_string(k));
    if (samples.size() < k + 1)
        throw ConfigError("hill_tail_index: need at least k+1 = " +
                          std::to_string(k + 1) + " samples, got " +
                          std::to_string(samples.size()));
    for (double v : samples)
        if (!(v > 0.0))
            throw ConfigError("hill_tail_index: samples must be strictly positive");

    std::sort(samples.begin(), samples.end(), std::greater<>());
    const double pivot = samples[k];  // X_(k+1)
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i)
        acc += std::log(samples[i] / pivot);
    const double mean_log = acc / static_cast<double>(k);

    HillEstimate est;
    est.k = k;
    est.alpha = 1.0 / mean_log;
    const double half = 1.96 / std::sqrt(static_cast<double>(k));
    est.ci_low = est.alpha * (1.0 - half);
    est.ci_high = est.alpha * (1.0 + half);
    return est;
}

LinFit linfit(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n != y.size())
        throw ConfigError("linfit: x and y must have the same length");
    if (n < 2)
        throw ConfigError("linfit: need at least 2 points");

    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) { sx += x[i]; sy += y[i]; }
    const double mx = sx / static_cast<double>(n);
    const double my = sy / static_cast<double>(n);

    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0.0)
        throw ConfigError("linfit: degenerate x values (all equal)");

    LinFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;

    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss_res += r * r;
    }
    fit.r2 = (syy <= 0.0) ? 1.0 : 1.0 - ss_res / syy;
    fit.slope_se =
        (n > 2) ? std::sqrt(ss_res / static_cast<double>(n - 2) / sxx) : 0.0;
    return fit;
}

Summary summarize(const std::vector<double>& values) {
    const std::size_t n = values.size();
    if (n < 2)
        throw ConfigError("summarize: need at least 2 values");

    double s1 = 0.0;
    for (double v : values) s1 += v;
    const double mean = s1 / static_cast<double>(n);
    double s2c = 0.0;
    for (double v : values) s2c += (v - mean) * (v - mean);

    Summary s;
    s.count = n;
    s.mean = mean;
    s.variance = s2c / static_cast<double>(n - 1);
    s.se_mean = std::sqrt(s.variance / static_cast<double>(n));

    if (n >= 3) {
        // Leave-one-out variances from the centered sums, O(n).
        const double nn = static_cast<double>(n);
        std::vector<double> loo(n);
        double loo_sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double di = values[i] - mean;
            const double s2c_i = s2c - di * di * nn / (nn - 1.0);
            loo[i] = s2c_i / (nn - 2.0);
            loo_sum += loo[i];
        }
        const double loo_mean = loo_sum / nn;
        double dev = 0.0;
        for (double v : loo) dev += (v - loo_mean) * (v - loo_mean);
        s.se_variance = std::sqrt((nn - 1.0) / nn * dev);
    }
    return s;
}

double rms(const std::vector<double>& values) {
    if (values.empty())
        throw ConfigError("rms: empty sample");
    double s2 = 0.0;
    for (double v : values) s2 += v * v;
    return std::sqrt(s2 / static_cast<double>(values.size()));
}

double rms_jackknife_se(const std::vector<double>& values) {
    const std::size_t n = values.size();
    if (n < 2)
        throw ConfigError("rms_jackknife_se: need at least 2 values");
    double s2 = 0.0;
    for (double v : values) s2 += v * v;
    const double nn = static_cast<double>(n);
    std::vector<double> loo(n);
    double loo_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        loo[i] = std::sqrt(std::max(0.0, (s2 - values[i] * values[i]) / (nn - 1.0)));
        loo_sum += loo[i];
    }
    const double loo_mean = loo_sum / nn;
    double dev = 0.0;
    for (double v : loo) dev += (v - loo_mean) * (v - loo_mean);
    return std::sqrt((nn - 1.0) / nn * dev);
}

BinomialCi wilson_interval(std::size_t successes, std::size_t trials) {
    if (trials == 0)
        throw ConfigError("wilson_interval: zero trials");
    if (successes > trials)
        throw ConfigError("wilson_interval: successes exceed trials");
    const double z = 1.96;
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double denom = 1.0 + z * z / n;
    const double center = (p + z * z / (2.0 * n)) / denom;
    const double half =
        z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
    BinomialCi ci;
    ci.fraction = p;
    ci.low = std::max(0.0, center - half);
    ci.high = std::min(1.0, center + half);
    return ci;
}

double median(std::vector<double> values) {
    if (values.empty())
        throw ConfigError("median: empty sample");
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + mid, values.end());
    double hi = values[mid];
    if (values.size() % 2 == 1) return hi;
    std::nth_element(values.begin(), values.begin() + mid - 1,
                     values.begin() + mid);
    return 0.5 * (values[mid - 1] + hi);
}

}
