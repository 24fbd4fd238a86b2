#include <doctest.h>

#include <cmath>
#include <vector>

#include "sdelab/errors.hpp"
#include "sdelab/model.hpp"
#include "sdelab/path.hpp"
#include "sdelab/reference.hpp"
#include "sdelab/scheme.hpp"
#include "sdelab/statkit.hpp"

using namespace sdelab;

TEST_CASE("reference method follows the model") {
    CHECK(reference::choose_ref_method(model::make_model("gbm")) ==
          reference::RefMethod::exact_gbm);
    CHECK(reference::choose_ref_method(model::make_model("bounded_sine")) ==
          reference::RefMethod::fine_milstein);
    CHECK(reference::choose_ref_method(model::make_model("abs_drift")) ==
          reference::RefMethod::fine_milstein);
    CHECK(reference::choose_ref_method(model::make_model("cir")) ==
          reference::RefMethod::fine_symmetrized_euler);
    CHECK(reference::choose_ref_method(model::make_model("cev")) ==
          reference::RefMethod::fine_symmetrized_euler);
}

TEST_CASE("geometric reference equals the closed form along the path") {
    auto m = model::make_model("gbm", {{"mu", 0.3}, {"sigma", 0.5}});
    auto g = path::generate_grid(77, 5, 2.0, 256);
    auto ref = reference::make_reference(m, 1.5, g);
    REQUIRE(ref.values.size() == 257);
    CHECK(ref.method == reference::RefMethod::exact_gbm);

    auto w = path::cumulative(g);
    const double h = g.step();
    double max_abs = 0.0;
    for (std::size_t j = 0; j <= 256; ++j) {
        const double t = static_cast<double>(j) * h;
        const double want =
            1.5 * std::exp((0.3 - 0.5 * 0.5 / 2.0) * t + 0.5 * w[j]);
        CHECK(ref.values[j] == doctest::Approx(want).epsilon(1e-12));
        max_abs = std::max(max_abs, std::fabs(ref.values[j]));
    }
    CHECK(ref.running_max_abs == doctest::Approx(max_abs));
}

TEST_CASE("scheme-based reference tracks the scheme it names") {
    auto m = model::make_model("bounded_sine");
    auto g = path::generate_grid(31, 2, 1.0, 128);
    auto ref = reference::make_reference(m, 0.5, g);
    auto mil = scheme::milstein(m, 0.5, g, 128);
    CHECK(ref.values == mil.values);

    auto cir = model::make_model("cir");
    auto g2 = path::generate_grid(31, 3, 1.0, 128);
    auto ref2 = reference::make_reference(cir, 1.0, g2);
    auto sym = scheme::symmetrized_euler(cir, 1.0, g2, 128);
    CHECK(ref2.values == sym.values);
}

TEST_CASE("coupled gaps shrink when the reference grid doubles") {
    auto m = model::make_model("bounded_sine");
    std::vector<double> gap64, gap256;
    for (std::uint64_t p = 0; p < 60; ++p) {
        gap64.push_back(std::fabs(
            reference::coupled_reference_gap(m, 1.0, 1.0, 128, 64, 5, p)));
        gap256.push_back(std::fabs(
            reference::coupled_reference_gap(m, 1.0, 1.0, 512, 256, 5, p)));
    }
    CHECK(statkit::rms(gap256) < statkit::rms(gap64));
}

TEST_CASE("coupled gap validates the refinement pair") {
    auto m = model::make_model("bounded_sine");
    CHECK_THROWS_AS(reference::coupled_reference_gap(m, 1.0, 1.0, 128, 96, 5, 0),
                    ConfigError);
}

TEST_CASE("ladder check accepts a fine reference and rejects a coarse one") {
    auto m = model::make_model("bounded_sine");
    auto good = reference::reference_ladder_check(
        m, 1.0, 1.0, 1 << 12, 16, scheme::SchemeKind::euler, 9, 100, 1);
    CHECK(good.pass);
    CHECK(good.paths == 100);
    CHECK(2.0 * good.gap_rms <= good.scheme_error_rms);

    // a reference on the scheme's own grid measures zero scheme error and
    // cannot dominate the refinement gap
    auto bad = reference::reference_ladder_check(
        m, 1.0, 1.0, 256, 256, scheme::SchemeKind::milstein, 9, 100, 1);
    CHECK_FALSE(bad.pass);
    CHECK(bad.scheme_error_rms == 0.0);
}
