#include "sdelab/reference.hpp"

#include <cmath>
#include <string>

#include "sdelab/errors.hpp"
#include "sdelab/montecarlo.hpp"
#include "sdelab/statkit.hpp"

namespace sdelab::reference {

const char* ref_method_name(RefMethod method) {
    switch (method) {
        case RefMethod::exact_gbm: return "exact_gbm";
        case RefMethod::fine_milstein: return "fine_milstein";
        case RefMethod::fine_symmetrized_euler: return "fine_symmetrized_euler";
    }
    return "?";
}

RefMethod choose_ref_method(const model::Model& m) {
    if (m.name == "gbm") return RefMethod::exact_gbm;
    if (m.domain == model::StateDomain::positive_half_line)
        return RefMethod::fine_symmetrized_euler;
    return RefMethod::fine_milstein;
}

namespace {

ReferenceTrajectory exact_gbm(const model::Model& m, double x0,
                              const path::BrownianGrid& grid) {
    const double mu = m.params.at("mu");
    const double sig = m.params.at("sigma");
    const double drift = mu - 0.5 * sig * sig;
    const double h = grid.step();

    ReferenceTrajectory ref;
    ref.values.resize(grid.n_fine() + 1);
    double w = 0.0;
    ref.values[0] = x0;
    ref.running_max_abs = std::fabs(x0);
    for (std::size_t j = 1; j <= grid.n_fine(); ++j) {
        w += grid.increments[j - 1];
        const double t = static_cast<double>(j) * h;
        const double x = x0 * std::exp(drift * t + sig * w);
        ref.values[j] = x;
        ref.running_max_abs = std::max(ref.running_max_abs, std::fabs(x));
    }
    return ref;
}

// Fine-grid stepper without anchor storage; mirrors scheme::run_impl's
// update arithmetic, including the saturation freeze.
ReferenceTrajectory fine_scheme(const model::Model& m, double x0,
                                const path::BrownianGrid& grid,
                                bool symmetrized) {
    const std::size_t n = grid.n_fine();
    const double h = grid.step();
    const bool milstein = !symmetrized;
    if (symmetrized && !(x0 > 0.0))
        throw DomainError("reference: start state must be positive, got " +
                          std::to_string(x0));

    ReferenceTrajectory ref;
    ref.values.resize(n + 1);
    double x = x0;
    ref.values[0] = x;
    ref.running_max_abs = std::fabs(x0);
    bool frozen = false;
    for (std::size_t k = 0; k < n; ++k) {
        if (!frozen) {
            const double dw = grid.increments[k];
            const double mu = m.drift(x);
            const double sig = m.diffusion(x);
            double next = x + mu * h + sig * dw;
            if (milstein)
                next += 0.5 * sig * m.diffusion_deriv(x) * (dw * dw - h) +
                        0.5 * mu * m.drift_deriv(x) * (h * h);
            else
                next = std::fabs(next);
            if (std::isnan(next))
                throw DomainError("reference on model '" + m.name +
                                  "': non-finite state at step " +
                                  std::to_string(k + 1));
            if (std::fabs(next) > scheme::kSaturationLevel) {
                next = next > 0.0 ? scheme::kSaturationLevel
                                  : -scheme::kSaturationLevel;
                ref.saturated = true;
                frozen = true;
            }
            x = next;
        }
        ref.values[k + 1] = x;
        ref.running_max_abs = std::max(ref.running_max_abs, std::fabs(x));
    }
    return ref;
}

}  // namespace

ReferenceTrajectory make_reference(const model::Model& m, double x0,
                                   const path::BrownianGrid& grid) {
    const RefMethod method = choose_ref_method(m);
    ReferenceTrajectory ref;
    switch (method) {
        case RefMethod::exact_gbm:
            ref = exact_gbm(m, x0, grid);
            break;
        case RefMethod::fine_symmetrized_euler:
            ref = fine_scheme(m, x0, grid, /*symmetrized=*/true);
            break;
        case RefMethod::fine_milstein:
            ref = fine_scheme(m, x0, grid, /*symmetrized=*/false);
            break;
    }
    ref.method = method;
    ref.model_name = m.name;
    ref.horizon = grid.horizon;
    ref.seed = grid.seed;
    ref.path_index = grid.path_index;
    return ref;
}

double coupled_reference_gap(const model::Model& m, double x0, double horizon,
                             std::size_t n_fine_hi, std::size_t n_fine_lo,
                             std::uint64_t seed, std::uint64_t path_index) {
    if (n_fine_lo == 0 || n_fine_hi % n_fine_lo != 0)
        throw ConfigError("coupled_reference_gap: refinements do not nest");
    const path::BrownianGrid hi =
        path::generate_grid(seed, path_index, horizon, n_fine_hi);
    path::BrownianGrid lo;
    lo.horizon = horizon;
    lo.seed = seed;
    lo.path_index = path_index;
    lo.increments = path::coarsen(hi, n_fine_lo);
    const ReferenceTrajectory ref_hi = make_reference(m, x0, hi);
    const ReferenceTrajectory ref_lo = make_reference(m, x0, lo);
    return ref_hi.terminal() - ref_lo.terminal();
}

LadderCheck reference_ladder_check(const model::Model& m, double x0,
                                   double horizon, std::size_t n_fine,
                                   std::size_t n_coarsest,
                                   scheme::SchemeKind kind, std::uint64_t seed,
                                   std::size_t paths, int workers) {
    if (paths < 2)
        throw ConfigError("reference_ladder_check: need at least 2 paths");
    // Dedicated stream range so check paths never reuse experiment paths.
    const std::uint64_t base = std::uint64_t{1} << 41;

    std::vector<double> gaps(paths), errors(paths);
    std::vector<char> usable(paths);
    mc::run_indexed(paths, workers, [&](std::size_t p) {
        const std::uint64_t idx = base + p;
        const path::BrownianGrid hi =
            path::generate_grid(seed, idx, horizon, 2 * n_fine);
        path::BrownianGrid lo;
        lo.horizon = horizon;
        lo.seed = seed;
        lo.path_index = idx;
        lo.increments = path::coarsen(hi, n_fine);
        const ReferenceTrajectory ref_hi = make_reference(m, x0, hi);
        const ReferenceTrajectory ref_lo = make_reference(m, x0, lo);
        const scheme::Trajectory coarse =
            scheme::run_scheme(kind, m, x0, lo, n_coarsest);
        usable[p] = !(ref_hi.saturated || ref_lo.saturated || coarse.saturated);
        gaps[p] = ref_hi.terminal() - ref_lo.terminal();
        errors[p] = coarse.values.back() - ref_lo.terminal();
    });

    std::vector<double> kept_gaps, kept_errors;
    kept_gaps.reserve(paths);
    kept_errors.reserve(paths);
    for (std::size_t p = 0; p < paths; ++p) {
        if (!usable[p]) continue;
        kept_gaps.push_back(gaps[p]);
        kept_errors.push_back(errors[p]);
    }
    if (kept_gaps.size() < 2)
        throw DomainError(
            "reference_ladder_check: nearly all check paths saturated ("
            + std::to_string(paths - kept_gaps.size()) + " of "
            + std::to_string(paths) + ")");

    LadderCheck check;
    check.paths = kept_gaps.size();
    check.saturated_paths = paths - kept_gaps.size();
    check.gap_rms = statkit::rms(kept_gaps);
    check.scheme_error_rms = statkit::rms(kept_errors);
    check.pass = 2.0 * check.gap_rms <= check.scheme_error_rms;
    return check;
}

}
