#include <doctest.h>

#include <cmath>
#include <vector>

#include "sdelab/errors.hpp"
#include "sdelab/limitlaw.hpp"
#include "sdelab/model.hpp"
#include "sdelab/path.hpp"
#include "sdelab/rng.hpp"
#include "sdelab/statkit.hpp"

using namespace sdelab;

namespace {

path::BrownianGrid manual_grid(std::vector<double> increments, double horizon,
                               std::uint64_t path_index) {
    path::BrownianGrid g;
    g.horizon = horizon;
    g.seed = 5;
    g.path_index = path_index;
    g.increments = std::move(increments);
    return g;
}

}

TEST_CASE("flat coefficients leave the limit process at zero") {
    model::Model m;
    m.name = "flat";
    m.drift = [](double) { return 0.3; };
    m.diffusion = [](double) { return 2.0; };
    m.drift_deriv = [](double) { return 0.0; };
    m.diffusion_deriv = [](double) { return 0.0; };
    auto w = path::generate_grid(4, path::stream::kLimitW, 1.0, 64);
    auto b = path::generate_grid(4, path::stream::kLimitB, 1.0, 64);
    auto traj = limitlaw::simulate_limit(m, 1.0, w, b);
    for (double v : traj.u) CHECK(v == 0.0);
    CHECK_FALSE(traj.stopped());
}

TEST_CASE("one limit step matches the written update") {
    auto m = model::make_model("inverse_bessel");
    auto w = manual_grid({0.1}, 1.0, 1);
    auto b = manual_grid({0.2}, 1.0, 2);
    auto traj = limitlaw::simulate_limit(m, 1.0, w, b);
    REQUIRE(traj.u.size() == 2);
    // u1 = (sqrt(2)/2) sqrt(T) sigma(x0) sigma'(x0) db = c * 1 * 2 * 0.2
    const double c = 0.5 * std::sqrt(2.0);
    CHECK(traj.u[1] == doctest::Approx(c * 2.0 * 0.2).epsilon(1e-15));
    // the reference state moved to |1 + 1^2 * 0.1| = 1.1
    CHECK(traj.x_ref[1] == doctest::Approx(1.1).epsilon(1e-15));
}

TEST_CASE("square-root model uses the general auxiliary coefficient") {
    // sigma(x) sigma'(x) = sigma^2/2 for sigma sqrt(x), so the B term is
    // (sqrt(2)/4) sigma^2 independent of the state
    const double sig = 0.1;
    auto m = model::make_model("cir");
    auto w = manual_grid({0.0}, 1.0, 1);
    auto b = manual_grid({0.3}, 1.0, 2);
    auto traj = limitlaw::simulate_limit(m, 1.0, w, b);
    const double want = std::sqrt(2.0) / 4.0 * sig * sig * 0.3;
    // drift-derivative term: -b * u * h vanishes since u0 = 0
    CHECK(traj.u[1] == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("limit simulation rejects mismatched driving noise") {
    auto m = model::make_model("gbm");
    auto w = path::generate_grid(4, 1, 1.0, 32);
    auto b16 = path::generate_grid(4, 2, 1.0, 16);
    CHECK_THROWS_AS(limitlaw::simulate_limit(m, 1.0, w, b16), ConfigError);
    auto same = path::generate_grid(4, 1, 1.0, 32);
    CHECK_THROWS_AS(limitlaw::simulate_limit(m, 1.0, w, same), ConfigError);
}

TEST_CASE("explosive reference states freeze the pair") {
    auto m = model::make_model("inverse_bessel");
    // push the reference over the stop level in one step
    auto w = manual_grid({2e6, 0.5}, 1.0, 1);
    auto b = manual_grid({0.1, 0.1}, 1.0, 2);
    auto traj = limitlaw::simulate_limit(m, 1.0, w, b);
    CHECK(traj.stopped());
    CHECK(traj.stop_step == 1);
    CHECK(traj.u[2] == traj.u[1]);
    CHECK(std::isfinite(traj.u[2]));
}

TEST_CASE("error-law sampling has coherent shapes and provenance") {
    auto m = model::make_model("gbm");
    const std::vector<double> cps = {0.25, 0.5, 0.75, 1.0};
    auto s = limitlaw::sample_error_law(m, 1.0, 1.0, 16, 16, 120, 7,
                                        scheme::SchemeKind::euler, cps, 1, true);
    CHECK(s.scheme_un.size() == 120);
    CHECK(s.limit_terminal.size() == 120);
    REQUIRE(s.limit_at.size() == 4);
    REQUIRE(s.limit_max.size() == 4);
    CHECK(s.limit_at[0].size() == 120);
    CHECK(s.checkpoints == cps);
    // terminal checkpoint values coincide with the terminal sample
    for (std::size_t p = 0; p < 120; ++p)
        CHECK(s.limit_at[3][p] == s.limit_terminal[p]);
    // running max dominates the value at every checkpoint
    for (std::size_t c = 0; c < 4; ++c)
        for (std::size_t p = 0; p < 120; ++p)
            CHECK(s.limit_max[c][p] >= std::fabs(s.limit_at[c][p]));

    auto no_scheme = limitlaw::sample_error_law(
        m, 1.0, 1.0, 16, 16, 120, 7, scheme::SchemeKind::euler, cps, 1, false);
    CHECK(no_scheme.scheme_un.empty());
    CHECK(no_scheme.limit_terminal.size() == 120);
    // the limit side is untouched by the scheme side switch
    CHECK(no_scheme.limit_terminal == s.limit_terminal);
}

TEST_CASE("error-law sampling validates its inputs") {
    auto m = model::make_model("gbm");
    const std::vector<double> cps = {0.25, 0.5, 0.75, 1.0};
    CHECK_THROWS_AS(limitlaw::sample_error_law(m, 1.0, 1.0, 16, 16, 99, 7,
                                               scheme::SchemeKind::euler, cps, 1,
                                               true),
                    ConfigError);
    CHECK_THROWS_AS(limitlaw::sample_error_law(m, 1.0, 1.0, 16, 16, 120, 7,
                                               scheme::SchemeKind::euler,
                                               {0.25, 0.5}, 1, true),
                    ConfigError);
    CHECK_THROWS_AS(limitlaw::sample_error_law(m, 1.0, 1.0, 16, 16, 120, 7,
                                               scheme::SchemeKind::euler,
                                               {1.0 / 3.0, 1.0}, 1, true),
                    ConfigError);
}

TEST_CASE("moment diagnostics on a hand-made sample set") {
    limitlaw::ErrorLawSamples s;
    s.checkpoints = {0.5, 1.0};
    const std::size_t count = 200;
    s.limit_terminal.resize(count);
    s.limit_at.assign(2, std::vector<double>(count));
    s.limit_max.assign(2, std::vector<double>(count));
    for (std::size_t p = 0; p < count; ++p) {
        const double sign = p % 2 == 0 ? 1.0 : -1.0;
        s.limit_at[0][p] = 0.5 * sign;
        s.limit_at[1][p] = 1.0 * sign;
        s.limit_max[0][p] = 0.6;
        s.limit_max[1][p] = 1.1;
        s.limit_terminal[p] = s.limit_at[1][p];
    }
    auto mr = limitlaw::moment_diagnostics(s);
    REQUIRE(mr.checkpoints.size() == 2);
    CHECK(mr.checkpoints[0].m2 == doctest::Approx(0.25));
    CHECK(mr.checkpoints[1].m2 == doctest::Approx(1.0));
    CHECK(mr.checkpoints[0].m2_max == doctest::Approx(0.36));
    CHECK(mr.checkpoints[1].m2_max == doctest::Approx(1.21));
    CHECK(mr.mean_zero_ok);
    CHECK(mr.m2_le_m2_max);
    CHECK(mr.m2_max_nondecreasing);
}

TEST_CASE("tail diagnostics separate light from heavy tails") {
    limitlaw::ErrorLawSamples light;
    light.checkpoints = {1.0};
    const std::size_t count = 2000;
    light.limit_terminal.resize(count);
    light.limit_at.assign(1, std::vector<double>(count));
    light.limit_max.assign(1, std::vector<double>(count));
    for (std::size_t p = 0; p < count; ++p) {
        light.limit_terminal[p] = rng::normal(3, 0, p);
        light.limit_at[0][p] = light.limit_terminal[p];
        light.limit_max[0][p] = std::fabs(light.limit_terminal[p]);
    }
    auto lm = limitlaw::moment_diagnostics(light);
    CHECK(lm.tail.estimated);
    CHECK(lm.tail.alpha > 2.0);
    CHECK_FALSE(lm.tail.infinite_variance);

    limitlaw::ErrorLawSamples heavy = light;
    for (std::size_t p = 0; p < count; ++p) {
        const double u = rng::uniform01(rng::keyed_word(3, 1, p));
        heavy.limit_terminal[p] = 1.0 / (1.0 - u);  // tail index 1
        heavy.limit_at[0][p] = heavy.limit_terminal[p];
        heavy.limit_max[0][p] = heavy.limit_terminal[p];
    }
    auto hm = limitlaw::moment_diagnostics(heavy);
    CHECK(hm.tail.estimated);
    CHECK(hm.tail.alpha < 2.0);
    CHECK(hm.tail.infinite_variance);
}

TEST_CASE("moment diagnostics run on the real pipeline") {
    auto m = model::make_model("bounded_sine");
    auto s = limitlaw::sample_error_law(m, 1.0, 1.0, 16, 16, 200, 11,
                                        scheme::SchemeKind::euler,
                                        {0.25, 0.5, 0.75, 1.0}, 1, false);
    auto mr = limitlaw::moment_diagnostics(s);
    CHECK(mr.m2_le_m2_max);
    CHECK(mr.m2_max_nondecreasing);
    // driftless diffusion: the limit error is a martingale started at zero
    CHECK(mr.mean_zero_ok);
}

TEST_CASE("limit ladder accepts a reasonable grid") {
    auto m = model::make_model("bounded_sine");
    auto lc = limitlaw::limit_ladder_check(m, 1.0, 1.0, 1024, 13, 120, 1);
    CHECK(lc.pass);
    CHECK(lc.paths == 120);
    CHECK(2.0 * lc.gap_median <= lc.scale_median);
    CHECK(lc.gap_median > 0.0);
}
