#include "sdelab/erroranalysis.hpp"

#include <cmath>
#include <string>

#include "sdelab/errors.hpp"

namespace sdelab::erroranalysis {

ErrorSample error_sample(const scheme::Trajectory& traj,
                         const reference::ReferenceTrajectory& ref,
                         const path::BrownianGrid& grid) {
    if (traj.seed != grid.seed || traj.path_index != grid.path_index ||
        traj.horizon != grid.horizon)
        throw ConfigError("error_sample: trajectory was built from a different path");
    if (ref.seed != grid.seed || ref.path_index != grid.path_index ||
        ref.horizon != grid.horizon)
        throw ConfigError("error_sample: reference was built from a different path");
    if (ref.values.size() != grid.n_fine() + 1)
        throw ConfigError("error_sample: reference resolution does not match grid");
    if (traj.n == 0 || grid.n_fine() % traj.n != 0)
        throw ConfigError("error_sample: scheme steps do not divide the fine grid");

    const std::size_t n_fine = grid.n_fine();
    const std::size_t ratio = n_fine / traj.n;
    const double h_fine = grid.step();
    const bool symmetrized = traj.scheme == scheme::SchemeKind::symmetrized_euler;

    double sup = 0.0;
    double dt = 0.0, dw = 0.0;
    std::size_t k = 0;
    for (std::size_t j = 0; j <= n_fine; ++j) {
        double value;
        if (j % ratio == 0) {
            k = j / ratio;
            dt = 0.0;
            dw = 0.0;
            value = traj.values[k];
        } else {
            const scheme::Anchor& a = traj.anchors[k];
            value = a.state + a.drift * dt + a.diffusion * dw +
                    a.ito_coeff * (dw * dw - dt) + a.drift2_coeff * (dt * dt);
            if (symmetrized) value = std::fabs(value);
        }
        sup = std::max(sup, std::fabs(value - ref.values[j]));
        if (j < n_fine) {
            dt += h_fine;
            dw += grid.increments[j];
        }
    }

    ErrorSample s;
    s.sup_error = sup;
    const double diff_T = traj.values[traj.n] - ref.values[n_fine];
    s.terminal_error = std::fabs(diff_T);
    const double root_n = std::sqrt(static_cast<double>(traj.n));
    s.normalized_sup = root_n * sup;
    s.normalized_terminal = root_n * diff_T;
    return s;
}

ZStats z_functionals(const path::BrownianGrid& grid, std::size_t n) {
    if (n == 0 || grid.n_fine() % n != 0)
        throw ConfigError("z_functionals: n = " + std::to_string(n) +
                          " does not divide the fine grid size " +
                          std::to_string(grid.n_fine()));

    const std::size_t n_fine = grid.n_fine();
    const std::size_t ratio = n_fine / n;
    const double h_fine = grid.step();
    const double h = grid.horizon / static_cast<double>(n);
    const double root_n = std::sqrt(static_cast<double>(n));

    double z11 = 0.0, z12 = 0.0, z21 = 0.0;
    double dt = 0.0, dw = 0.0;
    for (std::size_t j = 0; j < n_fine; ++j) {
        if (j % ratio == 0) {
            dt = 0.0;
            dw = 0.0;
        }
        // The sawtooth s - s_ is linear on each fine step, so the trapezoid
        // value (dt + h_fine/2) * h_fine integrates it exactly.
        z11 += (dt + 0.5 * h_fine) * h_fine;
        z12 += dt * grid.increments[j];
        z21 += dw * h_fine;
        dt += h_fine;
        dw += grid.increments[j];
    }

    double z22 = 0.0;
    for (double dwk : path::coarsen(grid, n)) z22 += dwk * dwk - h;

    ZStats z;
    z.z11 = root_n * z11;
    z.z12 = root_n * z12;
    z.z21 = root_n * z21;
    z.z22 = 0.5 * root_n * z22;
    return z;
}

double z11_closed_form(double horizon, std::size_t n) {
    return horizon * horizon / (2.0 * std::sqrt(static_cast<double>(n)));
}

RateFit fit_rate(const std::vector<std::size_t>& ns,
                 const std::vector<double>& rms_values) {
    if (ns.size() != rms_values.size())
        throw ConfigError("fit_rate: mismatched lengths");
    if (ns.size() < 3)
        throw ConfigError("fit_rate: need at least 3 step counts");
    for (std::size_t i = 0; i + 1 < ns.size(); ++i)
        if (ns[i] >= ns[i + 1])
            throw ConfigError("fit_rate: step counts must be strictly increasing");
    for (double v : rms_values)
        if (!(v > 0.0))
            throw ConfigError("fit_rate: rms value " + std::to_string(v) +
                              " is not positive (measurement at noise floor)");

    std::vector<double> x(ns.size()), y(ns.size());
    for (std::size_t i = 0; i < ns.size(); ++i) {
        x[i] = std::log(static_cast<double>(ns[i]));
        y[i] = std::log(rms_values[i]);
    }
    const statkit::LinFit fit = statkit::linfit(x, y);
    RateFit r;
    r.alpha = -fit.slope;
    r.intercept = fit.intercept;
    r.r2 = fit.r2;
    r.slope_se = fit.slope_se;
    return r;
}

}
