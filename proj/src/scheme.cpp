#include "sdelab/scheme.hpp"

#include <cmath>
#include <string>

#include "sdelab/errors.hpp"

namespace sdelab::scheme {

const char* scheme_name(SchemeKind kind) {
    switch (kind) {
        case SchemeKind::euler: return "euler";
        case SchemeKind::milstein: return "milstein";
        case SchemeKind::symmetrized_euler: return "symmetrized_euler";
    }
    return "?";
}

SchemeKind scheme_from_name(const std::string& name) {
    if (name == "euler") return SchemeKind::euler;
    if (name == "milstein") return SchemeKind::milstein;
    if (name == "symmetrized_euler") return SchemeKind::symmetrized_euler;
    throw ConfigError("unknown scheme '" + name +
                      "' (euler, milstein, symmetrized_euler)");
}

namespace {

// Shared one-step update.  Euler passes zero correction coefficients, so a
// Milstein run with vanishing derivatives reproduces Euler bit for bit.
inline double advance(const Anchor& a, double h, double dw) {
    return a.state + a.drift * h + a.diffusion * dw +
           a.ito_coeff * (dw * dw - h) + a.drift2_coeff * (h * h);
}

void check_grid(const path::BrownianGrid& grid, std::size_t n) {
    if (n == 0) throw ConfigError("scheme: n must be at least 1");
    if (grid.n_fine() % n != 0)
        throw ConfigError("scheme: n = " + std::to_string(n) +
                          " does not divide the fine grid size " +
                          std::to_string(grid.n_fine()));
}

Trajectory run_impl(SchemeKind kind, const model::Model& m, double x0,
                    const path::BrownianGrid& grid, std::size_t n) {
    check_grid(grid, n);
    const bool half_line = m.domain == model::StateDomain::positive_half_line;
    const bool symmetrized = kind == SchemeKind::symmetrized_euler;
    const bool with_corrections = kind == SchemeKind::milstein;
    if (half_line && !symmetrized && !(x0 > 0.0))
        throw DomainError("scheme: model '" + m.name +
                          "' needs a positive start state, got " +
                          std::to_string(x0));
    if (symmetrized) {
        if (!(x0 > 0.0))
            throw DomainError("symmetrized_euler: start state must be positive, got " +
                              std::to_string(x0));
        if (!std::isfinite(m.drift(0.0)) || !std::isfinite(m.diffusion(0.0)))
            throw DomainError("symmetrized_euler: model '" + m.name +
                              "' coefficients are not evaluable at 0");
    }

    Trajectory traj;
    traj.scheme = kind;
    traj.model_name = m.name;
    traj.horizon = grid.horizon;
    traj.seed = grid.seed;
    traj.path_index = grid.path_index;
    traj.n = n;
    traj.values.resize(n + 1);
    traj.anchors.resize(n);

    const std::vector<double> inc = path::coarsen(grid, n);
    const double h = grid.horizon / static_cast<double>(n);

    double x = x0;
    traj.values[0] = x;
    bool frozen = false;
    for (std::size_t k = 0; k < n; ++k) {
        Anchor& a = traj.anchors[k];
        if (frozen) {
            a = Anchor{x, 0.0, 0.0, 0.0, 0.0};
            traj.values[k + 1] = x;
            continue;
        }
        a.state = x;
        a.drift = m.drift(x);
        a.diffusion = m.diffusion(x);
        if (with_corrections) {
            a.ito_coeff = 0.5 * a.diffusion * m.diffusion_deriv(x);
            a.drift2_coeff = 0.5 * a.drift * m.drift_deriv(x);
        }
        double next = advance(a, h, inc[k]);
        if (symmetrized) next = std::fabs(next);
        if (std::isnan(next))
            throw DomainError("scheme '" + std::string(scheme_name(kind)) +
                              "' on model '" + m.name +
                              "': non-finite state at step " + std::to_string(k + 1));
        if (half_line && !symmetrized && next < 0.0)
            throw DomainError("scheme '" + std::string(scheme_name(kind)) +
                              "' on model '" + m.name + "': state " +
                              std::to_string(next) + " at step " +
                              std::to_string(k + 1) + " left the positive domain");
        if (std::fabs(next) > kSaturationLevel) {
            next = next > 0.0 ? kSaturationLevel : -kSaturationLevel;
            traj.saturated = true;
            frozen = true;
        }
        x = next;
        traj.values[k + 1] = x;
    }
    return traj;
}

}  // namespace

Trajectory euler(const model::Model& m, double x0, const path::BrownianGrid& grid,
                 std::size_t n) {
    return run_impl(SchemeKind::euler, m, x0, grid, n);
}

Trajectory milstein(const model::Model& m, double x0,
                    const path::BrownianGrid& grid, std::size_t n) {
    return run_impl(SchemeKind::milstein, m, x0, grid, n);
}

Trajectory symmetrized_euler(const model::Model& m, double x0,
                             const path::BrownianGrid& grid, std::size_t n) {
    return run_impl(SchemeKind::symmetrized_euler, m, x0, grid, n);
}

Trajectory run_scheme(SchemeKind kind, const model::Model& m, double x0,
                      const path::BrownianGrid& grid, std::size_t n) {
    return run_impl(kind, m, x0, grid, n);
}

double interpolate(const Trajectory& traj, double t,
                   const path::BrownianGrid& grid) {
    if (traj.seed != grid.seed || traj.path_index != grid.path_index ||
        traj.horizon != grid.horizon)
        throw ConfigError("interpolate: trajectory was built from a different path");
    check_grid(grid, traj.n);

    const std::size_t n_fine = grid.n_fine();
    const double h_fine = grid.step();
    const std::size_t j = path::left_index(t, n_fine, grid.horizon);
    if (std::fabs(t - static_cast<double>(j) * h_fine) > 1e-9 * grid.horizon)
        throw ConfigError("interpolate: t = " + std::to_string(t) +
                          " is not a fine-grid time");
    if (j == n_fine) return traj.values[traj.n];

    const std::size_t ratio = n_fine / traj.n;
    const std::size_t k = j / ratio;
    const std::size_t j0 = k * ratio;
    double dw = 0.0;
    for (std::size_t r = j0; r < j; ++r) dw += grid.increments[r];
    const double dt = static_cast<double>(j - j0) * h_fine;

    const Anchor& a = traj.anchors[k];
    double value = a.state + a.drift * dt + a.diffusion * dw +
                   a.ito_coeff * (dw * dw - dt) + a.drift2_coeff * (dt * dt);
    if (traj.scheme == SchemeKind::symmetrized_euler) value = std::fabs(value);
    return value;
}

StoppedTrajectory stop_at(const Trajectory& traj, double level) {
    if (!(level > 0.0))
        throw ConfigError("stop_at: level must be positive, got " +
                          std::to_string(level));
    StoppedTrajectory st;
    st.base = traj;
    st.level = level;
    for (std::size_t k = 0; k < traj.values.size(); ++k) {
        if (std::fabs(traj.values[k]) > level) {
            st.stop_index = k;
            break;
        }
    }
    if (st.stopped()) {
        const double frozen = st.base.values[st.stop_index];
        for (std::size_t k = st.stop_index + 1; k < st.base.values.size(); ++k)
            st.base.values[k] = frozen;
        for (std::size_t k = st.stop_index; k < st.base.anchors.size(); ++k)
            st.base.anchors[k] = Anchor{frozen, 0.0, 0.0, 0.0, 0.0};
    }
    return st;
}

}
