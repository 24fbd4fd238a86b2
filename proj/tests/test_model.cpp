#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "sdelab/errors.hpp"
#include "sdelab/model.hpp"

using namespace sdelab;

namespace {

model::Model quadratic_drift() {
    model::Model m;
    m.name = "quad";
    m.drift = [](double x) { return x * x; };
    m.diffusion = [](double x) { return 0.3 * x; };
    m.drift_deriv = [](double x) { return 2.0 * x; };
    m.diffusion_deriv = [](double) { return 0.3; };
    m.growth_exponent = 1.0;
    m.growth_constant = 2.0;
    return m;
}

bool near_any(double x, const std::vector<double>& points, double eps) {
    for (double p : points)
        if (std::fabs(x - p) <= eps) return true;
    return false;
}

}

// ==================================================================
// localization
// ==================================================================

TEST_CASE("truncation keeps the window, bends the band, freezes the rest") {
    auto t = model::truncate(quadratic_drift(), 2.0);
    CHECK(t.level == 2.0);
    CHECK(t.model.name == "quad_loc");
    CHECK(t.model.params.at("trunc_level") == 2.0);

    // inside the window: bit-identical to the base coefficient
    CHECK(t.model.drift(1.5) == 1.5 * 1.5);
    CHECK(t.model.drift(-1.5) == -1.5 * -1.5);
    // band: linear between f(2) = 4 and f(3) = 9
    CHECK(t.model.drift(2.5) == doctest::Approx(6.5).epsilon(1e-14));
    CHECK(t.model.drift(-2.5) == doctest::Approx(6.5).epsilon(1e-14));
    // frozen beyond the band
    CHECK(t.model.drift(3.5) == doctest::Approx(9.0));
    CHECK(t.model.drift(50.0) == doctest::Approx(9.0));
    CHECK(t.model.drift(-50.0) == doctest::Approx(9.0));

    // matching derivative branches
    CHECK(t.model.drift_deriv(1.0) == 2.0);
    CHECK(t.model.drift_deriv(2.5) == doctest::Approx(5.0));
    CHECK(t.model.drift_deriv(-2.5) == doctest::Approx(-5.0));
    CHECK(t.model.drift_deriv(4.0) == 0.0);
    CHECK(t.model.drift_deriv(-4.0) == 0.0);
}

TEST_CASE("truncated coefficients are globally Lipschitz") {
    auto t = model::truncate(quadratic_drift(), 2.0);
    // steepest the construction can get: the base slope on [-(m+1), m+1]
    double base_l = 0.0;
    for (double x = -3.0; x <= 3.0; x += 0.01)
        base_l = std::max(base_l, std::fabs(2.0 * x));
    for (double x = -5.0; x <= 5.0; x += 0.17) {
        for (double y = x + 0.05; y <= 5.0; y += 0.29) {
            const double q =
                std::fabs(t.model.drift(x) - t.model.drift(y)) / (y - x);
            CHECK(q <= base_l + 1e-9);
        }
    }
}

TEST_CASE("half-line truncation floors near zero instead of mirroring") {
    auto cir = model::make_model("cir");
    auto t = model::truncate(cir, 2.0);
    CHECK(t.lower_floor == doctest::Approx(1.0 / 3.0));
    // window values identical to the base model
    CHECK(t.model.diffusion(1.0) == cir.diffusion(1.0));
    CHECK(t.model.drift(0.5) == cir.drift(0.5));
    // frozen below the floor at the floor value
    CHECK(t.model.diffusion(0.1) == doctest::Approx(cir.diffusion(1.0 / 3.0)));
    CHECK(t.model.diffusion_deriv(0.1) == 0.0);
    // frozen above the band
    CHECK(t.model.diffusion(5.0) == doctest::Approx(cir.diffusion(3.0)));
}

TEST_CASE("truncation declares its kink points") {
    auto t = model::truncate(quadratic_drift(), 2.0);
    CHECK(near_any(2.0, t.model.nondifferentiable_points, 0.0));
    CHECK(near_any(3.0, t.model.nondifferentiable_points, 0.0));
    CHECK(near_any(-2.0, t.model.nondifferentiable_points, 0.0));
    CHECK(near_any(-3.0, t.model.nondifferentiable_points, 0.0));
}

TEST_CASE("truncate rejects unusable levels") {
    CHECK_THROWS_AS(model::truncate(quadratic_drift(), 0.0), ConfigError);
    CHECK_THROWS_AS(model::truncate(quadratic_drift(), -1.0), ConfigError);
    // on the half line the window [1/(m+1), m] must be nonempty
    CHECK_THROWS_AS(model::truncate(model::make_model("cir"), 0.5), ConfigError);
}

// ==================================================================
// catalog models
// ==================================================================

TEST_CASE("declared derivatives match central differences") {
    const double h = 1e-6;
    for (const auto& name : model::builtin_model_names()) {
        auto m = model::make_model(name);
        const bool half = m.domain == model::StateDomain::positive_half_line;
        const double lo = half ? 0.05 : -10.0;
        const double hi = 10.0;
        for (int i = 0; i <= 100; ++i) {
            const double x = lo + (hi - lo) * i / 100.0;
            if (near_any(x, m.nondifferentiable_points, 10.0 * h)) continue;
            const double dmu = (m.drift(x + h) - m.drift(x - h)) / (2.0 * h);
            const double dsig =
                (m.diffusion(x + h) - m.diffusion(x - h)) / (2.0 * h);
            CHECK(std::fabs(m.drift_deriv(x) - dmu) <=
                  1e-4 * (1.0 + std::fabs(m.drift_deriv(x))));
            CHECK(std::fabs(m.diffusion_deriv(x) - dsig) <=
                  1e-4 * (1.0 + std::fabs(m.diffusion_deriv(x))));
        }
    }
}

TEST_CASE("growth pair bounds the coefficient increments") {
    for (const auto& name : model::builtin_model_names()) {
        auto m = model::make_model(name);
        const bool half = m.domain == model::StateDomain::positive_half_line;
        const double lo = half ? 0.1 : -8.0;
        const double hi = 8.0;
        for (double x = lo; x <= hi; x += 0.37) {
            for (double y = x + 0.11; y <= hi; y += 0.53) {
                const double incr = std::fabs(m.drift(x) - m.drift(y)) +
                                    std::fabs(m.diffusion(x) - m.diffusion(y));
                const double bound =
                    std::pow(std::max(std::fabs(x), std::fabs(y)) +
                                 m.growth_constant,
                             m.growth_exponent) *
                    std::fabs(x - y);
                CHECK(incr <= bound * (1.0 + 1e-12));
            }
        }
    }
}

TEST_CASE("model catalog carries the advertised defaults") {
    auto gbm = model::make_model("gbm");
    CHECK(gbm.params.at("mu") == 0.5);
    CHECK(gbm.params.at("sigma") == 0.4);
    CHECK(gbm.domain == model::StateDomain::whole_line);
    CHECK(gbm.default_x0 == 1.0);
    CHECK(gbm.drift(2.0) == 1.0);
    CHECK(gbm.diffusion(2.0) == 0.8);

    auto bs = model::make_model("bounded_sine");
    CHECK(bs.drift(3.7) == 0.0);
    CHECK(bs.diffusion(0.0) == 2.0);
    CHECK(bs.diffusion_deriv(0.0) == 1.0);

    auto ab = model::make_model("abs_drift");
    CHECK(ab.drift(-2.0) == 2.0);
    CHECK(ab.drift_deriv(0.0) == 0.0);  // convention at the kink
    CHECK(ab.drift_deriv(1.0) == 1.0);
    CHECK(ab.drift_deriv(-1.0) == -1.0);

    auto ib = model::make_model("inverse_bessel");
    CHECK(ib.domain == model::StateDomain::positive_half_line);
    CHECK(ib.diffusion(3.0) == 9.0);
    CHECK(ib.diffusion_deriv(3.0) == 6.0);
    CHECK(ib.drift(3.0) == 0.0);
}

TEST_CASE("parameter overrides reach the coefficients") {
    auto m = model::make_model("gbm", {{"mu", -1.0}, {"sigma", 2.0}});
    CHECK(m.drift(3.0) == -3.0);
    CHECK(m.diffusion(3.0) == 6.0);
    auto cev = model::make_model("cev", {{"beta", 3.0}});
    CHECK(cev.diffusion(2.0) == 8.0);
    CHECK(cev.diffusion_deriv(2.0) == 12.0);
    CHECK(cev.growth_exponent == 2.0);
    // non-integer exponents go through pow and stay consistent
    auto frac = model::make_model("cev", {{"beta", 1.5}});
    CHECK(frac.diffusion(4.0) == doctest::Approx(8.0));
}

TEST_CASE("model construction rejects bad names and parameters") {
    CHECK_THROWS_AS(model::make_model("nope"), ConfigError);
    CHECK_THROWS_WITH_AS(model::make_model("nope"),
                         doctest::Contains("available:"), ConfigError);
    CHECK_THROWS_AS(model::make_model("gbm", {{"kappa", 1.0}}), ConfigError);
    CHECK_THROWS_AS(model::make_model("gbm", {{"sigma", -0.1}}), ConfigError);
    CHECK_THROWS_AS(model::make_model("cev", {{"beta", 1.0}}), ConfigError);
    CHECK_THROWS_AS(model::make_model("cev", {{"b", 0.0}}), ConfigError);
    CHECK_THROWS_AS(model::make_model("cir", {{"a", 0.0}}), ConfigError);
    CHECK_THROWS_AS(model::make_model("cir", {{"sigma", 0.0}}), ConfigError);
}

TEST_CASE("square-root moment condition at the default parameters") {
    auto c = model::check_cir_condition(1.0, 0.01, 0.1);
    CHECK(c.lhs == doctest::Approx(49.50125).epsilon(1e-12));
    CHECK(c.threshold == doctest::Approx(9.0));
    CHECK(c.holds);

    auto no = model::check_cir_condition(0.1, 1.0, 1.0);
    CHECK_FALSE(no.holds);

    CHECK_THROWS_AS(model::check_cir_condition(0.0, 1.0, 1.0), ConfigError);
    CHECK_THROWS_AS(model::check_cir_condition(1.0, 1.0, 0.0), ConfigError);
}
