#include "sdelab/limitlaw.hpp"

#include <cmath>
#include <string>

#include "sdelab/errors.hpp"
#include "sdelab/montecarlo.hpp"
#include "sdelab/reference.hpp"
#include "sdelab/statkit.hpp"

namespace sdelab::limitlaw {

LimitTrajectory simulate_limit(const model::Model& m, double x0,
                               const path::BrownianGrid& w,
                               const path::BrownianGrid& b) {
    if (w.n_fine() != b.n_fine() || w.horizon != b.horizon)
        throw ConfigError("simulate_limit: W and B grids do not match");
    if (w.seed == b.seed && w.path_index == b.path_index)
        throw ConfigError("simulate_limit: W and B must come from distinct streams");

    const reference::ReferenceTrajectory ref = reference::make_reference(m, x0, w);

    const std::size_t n = w.n_fine();
    const double h = w.step();
    const double b_coeff = 0.5 * std::sqrt(2.0) * std::sqrt(w.horizon);

    LimitTrajectory traj;
    traj.horizon = w.horizon;
    traj.n_fine = n;
    traj.u.resize(n + 1);
    traj.x_ref = ref.values;
    traj.u[0] = 0.0;

    double u = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (!traj.stopped()) {
            const double x = ref.values[k];
            const double sig_d = m.diffusion_deriv(x);
            u += m.drift_deriv(x) * u * h + sig_d * u * w.increments[k] +
                 b_coeff * m.diffusion(x) * sig_d * b.increments[k];
            if (std::fabs(ref.values[k + 1]) > kSimStopLevel)
                traj.stop_step = k + 1;
        }
        traj.u[k + 1] = u;
    }
    return traj;
}

ErrorLawSamples sample_error_law(const model::Model& m, double x0,
                                 double horizon, std::size_t n,
                                 std::size_t refinement, std::size_t paths,
                                 std::uint64_t seed, scheme::SchemeKind kind,
                                 const std::vector<double>& checkpoints,
                                 int workers, bool with_scheme_side) {
    if (paths < 100)
        throw ConfigError("sample_error_law: need at least 100 paths");
    if (n == 0 || refinement == 0)
        throw ConfigError("sample_error_law: n and refinement must be positive");
    if (checkpoints.empty() || checkpoints.back() != horizon)
        throw ConfigError("sample_error_law: last checkpoint must be the horizon");

    const std::size_t n_fine = n * refinement;
    // Checkpoint indices on the fine grid (times must sit on it).
    std::vector<std::size_t> cp_idx(checkpoints.size());
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        const double exact = checkpoints[c] / horizon * static_cast<double>(n_fine);
        cp_idx[c] = static_cast<std::size_t>(std::llround(exact));
        if (std::fabs(exact - static_cast<double>(cp_idx[c])) > 1e-9)
            throw ConfigError("sample_error_law: checkpoint " +
                              std::to_string(checkpoints[c]) +
                              " is not a fine-grid time");
    }

    ErrorLawSamples out;
    out.checkpoints = checkpoints;
    if (with_scheme_side) out.scheme_un.resize(paths);
    out.limit_terminal.resize(paths);
    out.limit_at.assign(checkpoints.size(), std::vector<double>(paths));
    out.limit_max.assign(checkpoints.size(), std::vector<double>(paths));
    std::vector<unsigned char> stopped(paths, 0), saturated(paths, 0);

    const double root_n = std::sqrt(static_cast<double>(n));

    mc::run_indexed(paths, workers, [&](std::size_t p) {
        if (with_scheme_side) {
            const path::BrownianGrid grid = path::generate_grid(
                seed, path::stream::kSchemeW + p, horizon, n_fine);
            const reference::ReferenceTrajectory ref =
                reference::make_reference(m, x0, grid);
            const scheme::Trajectory traj = scheme::run_scheme(kind, m, x0, grid, n);
            out.scheme_un[p] = root_n * (traj.values[n] - ref.terminal());
            saturated[p] = traj.saturated || ref.saturated;
        }
        const path::BrownianGrid w = path::generate_grid(
            seed, path::stream::kLimitW + p, horizon, n_fine);
        const path::BrownianGrid b = path::generate_grid(
            seed, path::stream::kLimitB + p, horizon, n_fine);
        const LimitTrajectory limit = simulate_limit(m, x0, w, b);
        out.limit_terminal[p] = limit.u.back();
        stopped[p] = limit.stopped();
        double running = 0.0;
        std::size_t j = 0;
        for (std::size_t c = 0; c < cp_idx.size(); ++c) {
            for (; j <= cp_idx[c]; ++j)
                running = std::max(running, std::fabs(limit.u[j]));
            out.limit_at[c][p] = limit.u[cp_idx[c]];
            out.limit_max[c][p] = running;
        }
    });

    for (std::size_t p = 0; p < paths; ++p) {
        out.limit_stopped_paths += stopped[p];
        out.scheme_saturated_paths += saturated[p];
    }
    return out;
}

MomentReport moment_diagnostics(const ErrorLawSamples& samples) {
    const std::size_t cps = samples.checkpoints.size();
    if (cps == 0 || samples.limit_at.size() != cps)
        throw ConfigError("moment_diagnostics: malformed samples");

    MomentReport report;
    report.checkpoints.resize(cps);
    report.mean_zero_ok = true;
    report.m2_le_m2_max = true;
    report.m2_max_nondecreasing = true;

    for (std::size_t c = 0; c < cps; ++c) {
        const std::vector<double>& u = samples.limit_at[c];
        const std::vector<double>& umax = samples.limit_max[c];
        CheckpointMoments& cp = report.checkpoints[c];
        cp.t = samples.checkpoints[c];

        const statkit::Summary s = statkit::summarize(u);
        cp.mean = s.mean;
        cp.se_mean = s.se_mean;

        std::vector<double> sq(u.size()), sqmax(umax.size());
        for (std::size_t i = 0; i < u.size(); ++i) sq[i] = u[i] * u[i];
        for (std::size_t i = 0; i < umax.size(); ++i) sqmax[i] = umax[i] * umax[i];
        const statkit::Summary s2 = statkit::summarize(sq);
        const statkit::Summary s2m = statkit::summarize(sqmax);
        cp.m2 = s2.mean;
        cp.se_m2 = s2.se_mean;
        cp.m2_max = s2m.mean;
        cp.se_m2_max = s2m.se_mean;

        if (std::fabs(cp.mean) > 3.0 * cp.se_mean) report.mean_zero_ok = false;
        if (cp.m2 > cp.m2_max) report.m2_le_m2_max = false;
        if (c > 0 && cp.m2_max < report.checkpoints[c - 1].m2_max)
            report.m2_max_nondecreasing = false;
    }

    // Tail index of |U_T| from the top 5% order statistics.
    std::vector<double> mags;
    mags.reserve(samples.limit_terminal.size());
    for (double v : samples.limit_terminal)
        if (std::fabs(v) > 0.0) mags.push_back(std::fabs(v));
    const std::size_t k = std::max<std::size_t>(
        10, static_cast<std::size_t>(
                std::llround(0.05 * static_cast<double>(samples.limit_terminal.size()))));
    if (mags.size() >= k + 1) {
        const statkit::HillEstimate hill = statkit::hill_tail_index(mags, k);
        report.tail.estimated = true;
        report.tail.alpha = hill.alpha;
        report.tail.ci_low = hill.ci_low;
        report.tail.ci_high = hill.ci_high;
        report.tail.k = hill.k;
        report.tail.infinite_variance = hill.alpha < 2.0 && hill.ci_high < 2.5;
    }
    return report;
}

LimitLadderCheck limit_ladder_check(const model::Model& m, double x0,
                                    double horizon, std::size_t n_fine,
                                    std::uint64_t seed, std::size_t paths,
                                    int workers) {
    if (paths < 2)
        throw ConfigError("limit_ladder_check: need at least 2 paths");
    const std::uint64_t base = std::uint64_t{1} << 42;

    std::vector<double> gaps(paths), scales(paths);
    mc::run_indexed(paths, workers, [&](std::size_t p) {
        const path::BrownianGrid w_hi = path::generate_grid(
            seed, path::stream::kLimitW + base + p, horizon, 2 * n_fine);
        const path::BrownianGrid b_hi = path::generate_grid(
            seed, path::stream::kLimitB + base + p, horizon, 2 * n_fine);
        path::BrownianGrid w_lo, b_lo;
        w_lo.horizon = b_lo.horizon = horizon;
        w_lo.seed = b_lo.seed = seed;
        w_lo.path_index = w_hi.path_index;
        b_lo.path_index = b_hi.path_index;
        w_lo.increments = path::coarsen(w_hi, n_fine);
        b_lo.increments = path::coarsen(b_hi, n_fine);
        const LimitTrajectory hi = simulate_limit(m, x0, w_hi, b_hi);
        const LimitTrajectory lo = simulate_limit(m, x0, w_lo, b_lo);
        gaps[p] = std::fabs(hi.u.back() - lo.u.back());
        scales[p] = std::fabs(hi.u.back());
    });

    LimitLadderCheck check;
    check.paths = paths;
    check.gap_median = statkit::median(gaps);
    check.scale_median = statkit::median(scales);
    check.pass = 2.0 * check.gap_median <= check.scale_median;
    return check;
}

}
