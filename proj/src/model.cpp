#include "sdelab/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "sdelab/errors.hpp"

namespace sdelab::model {

const char* domain_name(StateDomain d) {
    return d == StateDomain::whole_line ? "whole_line" : "positive_half_line";
}

namespace {

std::map<std::string, double> merge_params(
    const std::string& name, std::map<std::string, double> defaults,
    const std::map<std::string, double>& overrides) {
    for (const auto& [key, value] : overrides) {
        auto it = defaults.find(key);
        if (it == defaults.end())
            throw ConfigError("model '" + name + "' has no parameter '" + key + "'");
        it->second = value;
    }
    return defaults;
}

double ipow(double x, int p) {
    double r = 1.0;
    for (int i = 0; i < p; ++i) r *= x;
    return r;
}

Model make_gbm(const std::map<std::string, double>& overrides) {
    Model m;
    m.name = "gbm";
    m.params = merge_params(m.name, {{"mu", 0.5}, {"sigma", 0.4}}, overrides);
    const double mu = m.params.at("mu");
    const double sig = m.params.at("sigma");
    if (sig < 0.0) throw ConfigError("gbm: sigma must be nonnegative");
    m.drift = [mu](double x) { return mu * x; };
    m.diffusion = [sig](double x) { return sig * x; };
    m.drift_deriv = [mu](double) { return mu; };
    m.diffusion_deriv = [sig](double) { return sig; };
    m.growth_exponent = 1.0;
    m.growth_constant = std::fabs(mu) + std::fabs(sig) + 1.0;
    return m;
}

Model make_ou(const std::map<std::string, double>& overrides) {
    Model m;
    m.name = "ou";
    m.params = merge_params(m.name, {{"theta", 1.0}, {"sigma", 1.0}}, overrides);
    const double theta = m.params.at("theta");
    const double sig = m.params.at("sigma");
    if (sig < 0.0) throw ConfigError("ou: sigma must be nonnegative");
    m.drift = [theta](double x) { return -theta * x; };
    m.diffusion = [sig](double) { return sig; };
    m.drift_deriv = [theta](double) { return -theta; };
    m.diffusion_deriv = [](double) { return 0.0; };
    m.growth_exponent = 1.0;
    m.growth_constant = std::fabs(theta) + 1.0;
    return m;
}

Model make_bounded_sine(const std::map<std::string, double>& overrides) {
    Model m;
    m.name = "bounded_sine";
    m.params = merge_params(m.name, {}, overrides);
    m.drift = [](double) { return 0.0; };
    m.diffusion = [](double x) { return 2.0 + std::sin(x); };
    m.drift_deriv = [](double) { return 0.0; };
    m.diffusion_deriv = [](double x) { return std::cos(x); };
    m.growth_exponent = 1.0;
    m.growth_constant = 1.0;
    return m;
}

Model make_abs_drift(const std::map<std::string, double>& overrides) {
    Model m;
    m.name = "abs_drift";
    m.params = merge_params(m.name, {}, overrides);
    m.drift = [](double x) { return std::fabs(x); };
    m.diffusion = [](double x) { return 2.0 + std::sin(x); };
    // drift is not differentiable at 0; the derivative is taken to be 0 there
    m.drift_deriv = [](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); };
    m.diffusion_deriv = [](double x) { return std::cos(x); };
    m.growth_exponent = 1.0;
    m.growth_constant = 2.0;
    m.nondifferentiable_points = {0.0};
    return m;
}

Model make_inverse_bessel(const std::map<std::string, double>& overrides) {
    Model m;
    m.name = "inverse_bessel";
    m.domain = StateDomain::positive_half_line;
    m.params = merge_params(m.name, {}, overrides);
    m.drift = [](double) { return 0.0; };
    m.diffusion = [](double x) { return x * x; };
    m.drift_deriv = [](double) { return 0.0; };
    m.diffusion_deriv = [](double x) { return 2.0 * x; };
    m.growth_exponent = 1.0;
    m.growth_constant = 10.0;
    return m;
}

Model make_cir(const std::map<std::string, double>& overrides) {
    Model m;
    m.name = "cir";
    m.domain = StateDomain::positive_half_line;
    m.params = merge_params(m.name, {{"a", 1.0}, {"b", 0.01}, {"sigma", 0.1}},
                            overrides);
    const double a = m.params.at("a");
    const double b = m.params.at("b");
    const double sig = m.params.at("sigma");
    if (a <= 0.0) throw ConfigError("cir: a must be positive");
    if (sig <= 0.0) throw ConfigError("cir: sigma must be positive");
    m.drift = [a, b](double x) { return a - b * x; };
    m.diffusion = [sig](double x) { return sig * std::sqrt(x); };
    m.drift_deriv = [b](double) { return -b; };
    m.diffusion_deriv = [sig](double x) { return 0.5 * sig / std::sqrt(x); };
    m.growth_exponent = 1.0;
    m.growth_constant = 1.0 + std::fabs(b) + 3.0 * sig;
    return m;
}

Model make_cev(const std::map<std::string, double>& overrides) {
    Model m;
    m.name = "cev";
    m.domain = StateDomain::positive_half_line;
    m.params = merge_params(m.name, {{"b", 1.0}, {"beta", 2.0}}, overrides);
    const double b = m.params.at("b");
    const double beta = m.params.at("beta");
    if (b <= 0.0) throw ConfigError("cev: b must be positive");
    if (!(beta > 1.0)) throw ConfigError("cev: beta must exceed 1");
    const int ibeta = static_cast<int>(beta);
    if (beta == static_cast<double>(ibeta) && ibeta <= 8) {
        m.diffusion = [b, ibeta](double x) { return b * ipow(x, ibeta); };
        m.diffusion_deriv = [b, beta, ibeta](double x) {
            return b * beta * ipow(x, ibeta - 1);
        };
    } else {
        m.diffusion = [b, beta](double x) { return b * std::pow(x, beta); };
        m.diffusion_deriv = [b, beta](double x) {
            return b * beta * std::pow(x, beta - 1.0);
        };
    }
    m.drift = [](double) { return 0.0; };
    m.drift_deriv = [](double) { return 0.0; };
    m.growth_exponent = beta - 1.0;
    m.growth_constant = 10.0 * (1.0 + b * beta);
    return m;
}

}  // namespace

const std::vector<std::string>& builtin_model_names() {
    static const std::vector<std::string> names = {
        "gbm", "ou", "bounded_sine", "abs_drift", "inverse_bessel", "cir", "cev"};
    return names;
}

Model make_model(const std::string& name,
                 const std::map<std::string, double>& overrides) {
    if (name == "gbm") return make_gbm(overrides);
    if (name == "ou") return make_ou(overrides);
    if (name == "bounded_sine") return make_bounded_sine(overrides);
    if (name == "abs_drift") return make_abs_drift(overrides);
    if (name == "inverse_bessel") return make_inverse_bessel(overrides);
    if (name == "cir") return make_cir(overrides);
    if (name == "cev") return make_cev(overrides);
    std::string known;
    for (const auto& n : builtin_model_names())
        known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown model '" + name + "' (available: " + known + ")");
}

namespace {

// Piecewise continuation of f outside the window: base values inside,
// constants beyond the one-unit transition band, linear in between.  The
// inside branch calls the base function directly so values there are
// bit-identical to the unlocalized model.
std::function<double(double)> localize_value(std::function<double(double)> f,
                                             double m, double floor_value,
                                             bool half_line) {
    const double f_hi = f(m);
    const double f_hi1 = f(m + 1.0);
    if (half_line) {
        const double f_floor = f(floor_value);
        return [f, m, floor_value, f_hi, f_hi1, f_floor](double x) {
            if (x < floor_value) return f_floor;
            if (x <= m) return f(x);
            if (x >= m + 1.0) return f_hi1;
            return f_hi + (x - m) * (f_hi1 - f_hi);
        };
    }
    const double f_lo = f(-m);
    const double f_lo1 = f(-(m + 1.0));
    return [f, m, f_hi, f_hi1, f_lo, f_lo1](double x) {
        if (x >= -m && x <= m) return f(x);
        if (x >= m + 1.0) return f_hi1;
        if (x > m) return f_hi + (x - m) * (f_hi1 - f_hi);
        if (x <= -(m + 1.0)) return f_lo1;
        return f_lo1 + (x + m + 1.0) * (f_lo - f_lo1);
    };
}

std::function<double(double)> localize_deriv(std::function<double(double)> f,
                                             std::function<double(double)> fd,
                                             double m, double floor_value,
                                             bool half_line) {
    const double slope_hi = f(m + 1.0) - f(m);
    if (half_line) {
        return [fd, m, floor_value, slope_hi](double x) {
            if (x < floor_value) return 0.0;
            if (x <= m) return fd(x);
            if (x >= m + 1.0) return 0.0;
            return slope_hi;
        };
    }
    const double slope_lo = f(-m) - f(-(m + 1.0));
    return [fd, m, slope_hi, slope_lo](double x) {
        if (x >= -m && x <= m) return fd(x);
        if (x > m) return x >= m + 1.0 ? 0.0 : slope_hi;
        return x <= -(m + 1.0) ? 0.0 : slope_lo;
    };
}

}  // namespace

TruncatedModel truncate(const Model& base, double m) {
    if (!(m > 0.0))
        throw ConfigError("truncate: level must be positive, got " +
                          std::to_string(m));
    const bool half_line = base.domain == StateDomain::positive_half_line;
    const double floor_value = 1.0 / (m + 1.0);
    if (half_line && !(floor_value < m))
        throw ConfigError("truncate: level " + std::to_string(m) +
                          " leaves an empty window [1/(m+1), m] on the half line");

    TruncatedModel t;
    t.level = m;
    t.lower_floor = half_line ? floor_value : 0.0;
    t.model = base;
    t.model.name = base.name + "_loc";
    t.model.params["trunc_level"] = m;
    t.model.drift = localize_value(base.drift, m, floor_value, half_line);
    t.model.diffusion = localize_value(base.diffusion, m, floor_value, half_line);
    t.model.drift_deriv =
        localize_deriv(base.drift, base.drift_deriv, m, floor_value, half_line);
    t.model.diffusion_deriv = localize_deriv(base.diffusion, base.diffusion_deriv,
                                             m, floor_value, half_line);
    t.model.nondifferentiable_points.push_back(m);
    t.model.nondifferentiable_points.push_back(m + 1.0);
    if (half_line) {
        t.model.nondifferentiable_points.push_back(floor_value);
    } else {
        t.model.nondifferentiable_points.push_back(-m);
        t.model.nondifferentiable_points.push_back(-(m + 1.0));
    }
    return t;
}

CirCondition check_cir_condition(double a, double b, double sigma) {
    if (a <= 0.0)
        throw ConfigError("check_cir_condition: a must be positive");
    if (sigma <= 0.0)
        throw ConfigError("check_cir_condition: sigma must be positive");
    CirCondition c;
    const double s2 = sigma * sigma;
    const double q = 2.0 * a / s2 - 1.0;
    c.lhs = s2 / 8.0 * q * q;
    c.threshold = std::max(31.0 * b, 900.0 * s2);
    c.holds = c.lhs > c.threshold;
    return c;
}

}
