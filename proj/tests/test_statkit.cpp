#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "sdelab/errors.hpp"
#include "sdelab/rng.hpp"
#include "sdelab/statkit.hpp"

using namespace sdelab;

namespace {

// Brute-force leave-one-out jackknife standard error of a statistic.
template <typename Fn>
double jackknife_oracle(const std::vector<double>& v, Fn stat) {
    const std::size_t n = v.size();
    std::vector<double> loo(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> rest;
        rest.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) rest.push_back(v[j]);
        loo[i] = stat(rest);
    }
    double mean = 0.0;
    for (double x : loo) mean += x;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double x : loo) ss += (x - mean) * (x - mean);
    return std::sqrt(ss * static_cast<double>(n - 1) / static_cast<double>(n));
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double var_of(const std::vector<double>& v) {
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return ss / static_cast<double>(v.size() - 1);
}

double rms_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s / static_cast<double>(v.size()));
}

std::vector<double> pareto_sample(double alpha, std::size_t count,
                                  std::uint64_t stream) {
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double u = rng::uniform01(rng::keyed_word(123, stream, i));
        out[i] = std::pow(1.0 - u, -1.0 / alpha);
    }
    return out;
}

}

// ==================================================================
// Kolmogorov-Smirnov
// ==================================================================

TEST_CASE("ks distance on disjoint and interleaved samples") {
    auto full = statkit::ks_two_sample({1, 2, 3, 4}, {5, 6, 7, 8});
    CHECK(full.d == doctest::Approx(1.0));
    auto half = statkit::ks_two_sample({1, 2}, {1.5, 2.5});
    CHECK(half.d == doctest::Approx(0.5));
    auto same = statkit::ks_two_sample({1, 2, 3}, {1, 2, 3});
    CHECK(same.d == doctest::Approx(0.0));
}

TEST_CASE("ks handles ties by advancing both samples through the block") {
    auto r = statkit::ks_two_sample({1, 1, 2}, {1, 2, 2});
    CHECK(r.d == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("ks is symmetric and invariant under monotone maps") {
    std::vector<double> a, b;
    for (std::size_t i = 0; i < 200; ++i) {
        a.push_back(rng::normal(5, 0, i));
        b.push_back(rng::normal(5, 1, i) * 1.2 + 0.1);
    }
    auto ab = statkit::ks_two_sample(a, b);
    auto ba = statkit::ks_two_sample(b, a);
    CHECK(ab.d == ba.d);

    auto ea = a, eb = b;
    for (auto& x : ea) x = std::exp(x);
    for (auto& x : eb) x = std::exp(x);
    auto mapped = statkit::ks_two_sample(ea, eb);
    CHECK(mapped.d == ab.d);
}

TEST_CASE("ks critical value follows the 5% two-sample formula") {
    std::vector<double> a(100, 0.0), b(50, 0.0);
    auto r = statkit::ks_two_sample(a, b);
    CHECK(r.critical_05 ==
          doctest::Approx(1.358 * std::sqrt(150.0 / (100.0 * 50.0))));
    CHECK(r.m == 100);
    CHECK(r.n == 50);
}

TEST_CASE("ks rejects empty samples") {
    CHECK_THROWS_AS(statkit::ks_two_sample({}, {1.0}), ConfigError);
    CHECK_THROWS_AS(statkit::ks_two_sample({1.0}, {}), ConfigError);
}

// ==================================================================
// Hill estimator
// ==================================================================

TEST_CASE("hill estimate matches the geometric-ladder closed form") {
    // with order statistics exp(j/alpha), j = 0..m, the mean log ratio over
    // the top k is (k+1)/(2 alpha), so the estimate is 2 alpha / (k+1)
    const double alpha = 2.0;
    std::vector<double> v;
    for (int j = 0; j <= 40; ++j)
        v.push_back(std::exp(static_cast<double>(j) / alpha));
    const std::size_t k = 20;
    auto h = statkit::hill_tail_index(v, k);
    CHECK(h.alpha ==
          doctest::Approx(2.0 * alpha / static_cast<double>(k + 1)).epsilon(1e-12));
    CHECK(h.k == k);
    CHECK(h.ci_low == doctest::Approx(h.alpha * (1.0 - 1.96 / std::sqrt(20.0))));
    CHECK(h.ci_high == doctest::Approx(h.alpha * (1.0 + 1.96 / std::sqrt(20.0))));
}

TEST_CASE("hill recovers pareto tail indices") {
    // the estimator's relative sd is 1/sqrt(k); windows sit at about 3 sigma
    auto heavy = statkit::hill_tail_index(pareto_sample(1.0, 5000, 1), 250);
    CHECK(heavy.alpha > 0.8);
    CHECK(heavy.alpha < 1.2);
    auto light = statkit::hill_tail_index(pareto_sample(3.0, 5000, 2), 250);
    CHECK(light.alpha > 2.45);
    CHECK(light.alpha < 3.55);
}

TEST_CASE("hill estimate is scale invariant") {
    auto v = pareto_sample(1.5, 2000, 3);
    auto base = statkit::hill_tail_index(v, 100);
    auto scaled = v;
    for (auto& x : scaled) x *= 0x1.0p-40;  // power of two: exact rescale
    auto s = statkit::hill_tail_index(scaled, 100);
    CHECK(s.alpha == base.alpha);
}

TEST_CASE("hill rejects tiny k and nonpositive data") {
    auto v = pareto_sample(1.0, 100, 4);
    CHECK_THROWS_AS(statkit::hill_tail_index(v, 9), ConfigError);
    std::vector<double> flat(20, 0.0);
    CHECK_THROWS_AS(statkit::hill_tail_index(flat, 10), ConfigError);
}

// ==================================================================
// line fits
// ==================================================================

TEST_CASE("linfit reproduces an exact line") {
    std::vector<double> x = {1, 2, 3, 4, 5};
    std::vector<double> y;
    for (double v : x) y.push_back(2.0 - 3.0 * v);
    auto f = statkit::linfit(x, y);
    CHECK(f.slope == doctest::Approx(-3.0).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(f.r2 == doctest::Approx(1.0));
    CHECK(f.slope_se == doctest::Approx(0.0));
}

TEST_CASE("linfit reports r2 = 1 for constant y") {
    auto f = statkit::linfit({1, 2, 3}, {4, 4, 4});
    CHECK(f.slope == doctest::Approx(0.0));
    CHECK(f.r2 == doctest::Approx(1.0));
}

TEST_CASE("linfit validates its input") {
    CHECK_THROWS_AS(statkit::linfit({1}, {1}), ConfigError);
    CHECK_THROWS_AS(statkit::linfit({1, 1, 1}, {1, 2, 3}), ConfigError);
    CHECK_THROWS_AS(statkit::linfit({1, 2}, {1, 2, 3}), ConfigError);
}

// ==================================================================
// summaries
// ==================================================================

TEST_CASE("summarize matches hand-computed moments") {
    auto s = statkit::summarize({1, 2, 3, 4});
    CHECK(s.count == 4);
    CHECK(s.mean == doctest::Approx(2.5));
    CHECK(s.variance == doctest::Approx(5.0 / 3.0));
    CHECK(s.se_mean == doctest::Approx(std::sqrt(5.0 / 12.0)));
}

TEST_CASE("jackknife errors agree with the brute-force oracle") {
    std::vector<double> v;
    for (std::size_t i = 0; i < 40; ++i) v.push_back(rng::normal(77, 0, i));

    auto s = statkit::summarize(v);
    CHECK(s.se_variance ==
          doctest::Approx(jackknife_oracle(v, var_of)).epsilon(1e-10));
    CHECK(statkit::rms_jackknife_se(v) ==
          doctest::Approx(jackknife_oracle(v, rms_of)).epsilon(1e-10));
}

TEST_CASE("rms of a tiny sample") {
    CHECK(statkit::rms({3.0, 4.0}) == doctest::Approx(std::sqrt(12.5)));
}

TEST_CASE("wilson interval matches the score formula and clamps") {
    const double z = 1.96, n = 10.0, p = 0.5;
    auto ci = statkit::wilson_interval(5, 10);
    const double denom = 1.0 + z * z / n;
    const double center = (p + z * z / (2 * n)) / denom;
    const double hw =
        z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom;
    CHECK(ci.fraction == doctest::Approx(0.5));
    CHECK(ci.low == doctest::Approx(center - hw).epsilon(1e-12));
    CHECK(ci.high == doctest::Approx(center + hw).epsilon(1e-12));

    auto zero = statkit::wilson_interval(0, 20);
    CHECK(zero.low == 0.0);
    CHECK(zero.high > 0.0);
    auto all = statkit::wilson_interval(20, 20);
    CHECK(all.high == 1.0);
    CHECK(all.low < 1.0);
    CHECK_THROWS_AS(statkit::wilson_interval(1, 0), ConfigError);
    CHECK_THROWS_AS(statkit::wilson_interval(5, 4), ConfigError);
}

TEST_CASE("median uses the midpoint convention") {
    CHECK(statkit::median({3, 1, 2}) == doctest::Approx(2.0));
    CHECK(statkit::median({4, 1, 3, 2}) == doctest::Approx(2.5));
}
