#include "sdelab/weakerror.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sdelab/errors.hpp"
#include "sdelab/montecarlo.hpp"
#include "sdelab/reference.hpp"
#include "sdelab/statkit.hpp"

namespace sdelab::weakerror {

FunctionalSpec clamp_functional(double lo, double hi) {
    if (!(lo < hi))
        throw ConfigError("clamp_functional: lo must be below hi");
    FunctionalSpec f;
    f.name = "clamp";
    f.g = [lo, hi](double x) { return std::min(hi, std::max(lo, x)); };
    f.sup_norm = std::max(std::fabs(lo), std::fabs(hi));
    f.lipschitz = 1.0;
    return f;
}

WeakErrorReport estimate_weak_error(const model::Model& m, double x0,
                                    double horizon, const FunctionalSpec& g,
                                    const std::vector<std::size_t>& ns,
                                    std::size_t paths, std::size_t refinement,
                                    std::uint64_t seed, int workers) {
    if (paths < 1000)
        throw ConfigError("estimate_weak_error: need at least 1000 paths");
    if (ns.empty())
        throw ConfigError("estimate_weak_error: empty step count list");
    for (std::size_t i = 0; i + 1 < ns.size(); ++i)
        if (ns[i] >= ns[i + 1])
            throw ConfigError("estimate_weak_error: step counts must be strictly increasing");
    if (refinement == 0)
        throw ConfigError("estimate_weak_error: refinement must be positive");
    const std::size_t n_fine = refinement * ns.back();
    for (std::size_t n : ns)
        if (n == 0 || n_fine % n != 0)
            throw ConfigError("estimate_weak_error: n = " + std::to_string(n) +
                              " does not divide the fine grid " +
                              std::to_string(n_fine));

    const scheme::SchemeKind kind =
        m.domain == model::StateDomain::positive_half_line
            ? scheme::SchemeKind::symmetrized_euler
            : scheme::SchemeKind::euler;

    std::vector<std::vector<double>> diffs(ns.size(),
                                           std::vector<double>(paths));
    std::vector<double> sups(paths);
    std::vector<unsigned char> saturated(paths, 0);

    mc::run_indexed(paths, workers, [&](std::size_t p) {
        const path::BrownianGrid grid = path::generate_grid(
            seed, path::stream::kSchemeW + p, horizon, n_fine);
        const reference::ReferenceTrajectory ref =
            reference::make_reference(m, x0, grid);
        const double g_ref = g.g(ref.terminal());
        sups[p] = ref.running_max_abs;
        saturated[p] = ref.saturated;
        for (std::size_t q = 0; q < ns.size(); ++q) {
            const scheme::Trajectory traj =
                scheme::run_scheme(kind, m, x0, grid, ns[q]);
            diffs[q][p] = g.g(traj.values[ns[q]]) - g_ref;
            if (traj.saturated) saturated[p] = 1;
        }
    });

    WeakErrorReport report;
    report.paths = paths;
    report.growth_exponent = m.growth_exponent;
    report.sup_samples = std::move(sups);
    for (unsigned char s : saturated) report.saturated_paths += s;

    report.rows.resize(ns.size());
    for (std::size_t q = 0; q < ns.size(); ++q) {
        const statkit::Summary s = statkit::summarize(diffs[q]);
        report.rows[q].n = ns[q];
        report.rows[q].estimate = std::fabs(s.mean);
        report.rows[q].se = s.se_mean;
    }

    // Tail exponent: exactly 1 for the power diffusion with beta > 1, else
    // estimated from the running-max samples.
    if (m.name == "cev") {
        report.nu = 1.0;
        report.kappa = x0;
    } else {
        const std::size_t k = std::max<std::size_t>(
            10,
            static_cast<std::size_t>(std::llround(0.05 * static_cast<double>(paths))));
        std::vector<double> mags;
        mags.reserve(paths);
        for (double v : report.sup_samples)
            if (v > 0.0) mags.push_back(v);
        if (mags.size() >= k + 1) {
            const statkit::HillEstimate hill = statkit::hill_tail_index(mags, k);
            report.nu = hill.alpha;
            std::sort(mags.begin(), mags.end(), std::greater<>());
            report.kappa = static_cast<double>(k) / static_cast<double>(paths) *
                           std::pow(mags[k], hill.alpha);
        } else {
            report.nu = 1.0;
            report.kappa = x0;
        }
    }

    const double a = report.growth_exponent;
    const double decay = report.nu / a;
    report.bound_constant =
        report.rows.front().estimate *
        std::pow(std::log(static_cast<double>(ns.front())), decay);
    for (std::size_t q = 0; q < ns.size(); ++q)
        report.rows[q].bound =
            report.bound_constant /
            std::pow(std::log(static_cast<double>(ns[q])), decay);

    report.noise_floor = true;
    for (const WeakErrorRow& row : report.rows) {
        if (row.estimate > 0.0 && row.estimate >= 3.0 * row.se)
            report.noise_floor = false;
    }
    for (std::size_t q = 0; q + 1 < ns.size(); ++q) {
        const double slack = 2.0 * std::hypot(report.rows[q].se,
                                              report.rows[q + 1].se);
        if (report.rows[q + 1].estimate > report.rows[q].estimate + slack)
            report.nonincreasing_ok = false;
    }
    for (std::size_t q = 1; q < ns.size(); ++q)
        if (report.rows[q].estimate >
            report.rows[q].bound + 2.0 * report.rows[q].se)
            report.bound_ok = false;

    return report;
}

std::vector<TailCheckRow> tail_probability_check(
    const std::vector<double>& sup_samples, double x0,
    const std::vector<double>& thresholds) {
    if (sup_samples.empty())
        throw ConfigError("tail_probability_check: empty samples");
    if (!(x0 > 0.0))
        throw ConfigError("tail_probability_check: x0 must be positive");

    std::vector<TailCheckRow> rows;
    rows.reserve(thresholds.size());
    for (double x : thresholds) {
        if (!(x > x0))
            throw ConfigError("tail_probability_check: threshold " +
                              std::to_string(x) + " must exceed x0 = " +
                              std::to_string(x0));
        std::size_t count = 0;
        for (double s : sup_samples)
            if (s > x) ++count;
        const statkit::BinomialCi ci =
            statkit::wilson_interval(count, sup_samples.size());
        TailCheckRow row;
        row.threshold = x;
        row.fraction = ci.fraction;
        row.ci_low = ci.low;
        row.ci_high = ci.high;
        row.bound = x0 / x;
        row.pass = row.ci_low < row.bound;
        rows.push_back(row);
    }
    return rows;
}

}
