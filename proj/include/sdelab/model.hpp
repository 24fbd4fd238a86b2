#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

// Scalar diffusion models dX = mu(X) dt + sigma(X) dW with locally
// Lipschitz coefficients, plus the localization device that replaces the
// coefficients outside a compact window by bounded continuations.

namespace sdelab::model {

enum class StateDomain { whole_line, positive_half_line };

const char* domain_name(StateDomain d);

struct Model {
    std::string name;
    StateDomain domain = StateDomain::whole_line;
    std::map<std::string, double> params;

    std::function<double(double)> drift;
    std::function<double(double)> diffusion;
    // Derivatives follow the convention: zero wherever the coefficient is
    // not differentiable (the declared points below).
    std::function<double(double)> drift_deriv;
    std::function<double(double)> diffusion_deriv;

    // Growth pair (a, K): |mu(x)-mu(y)| + |sigma(x)-sigma(y)| is bounded by
    // (max{|x|,|y|} + K)^a * |x-y| on the sampled check window.
    double growth_exponent = 1.0;
    double growth_constant = 1.0;

    std::vector<double> nondifferentiable_points;
    double default_x0 = 1.0;
};

// Localized coefficients: identical to the base model on [-m, m], constant
// beyond +-(m+1), linear in between.  Positive half-line models are instead
// kept on [floor, m] with floor = 1/(m+1) and held constant below the floor.
struct TruncatedModel {
    double level = 0.0;        // m
    double lower_floor = 0.0;  // 1/(m+1) for half-line models, else unused
    Model model;
};

// Throws ConfigError for m <= 0, or for half-line models whose window
// [1/(m+1), m] would be empty.
TruncatedModel truncate(const Model& base, double m);

const std::vector<std::string>& builtin_model_names();

// Build a catalog model with optional parameter overrides.  Unknown names
// or parameter keys and invalid parameter values raise ConfigError.
Model make_model(const std::string& name,
                 const std::map<std::string, double>& overrides = {});

struct CirCondition {
    double lhs = 0.0;        // (sigma^2/8) * (2a/sigma^2 - 1)^2
    double threshold = 0.0;  // max{31 b, 900 sigma^2}
    bool holds = false;
};

// Sufficient condition for eighth-moment control of the square-root model
// dX = (a - bX) dt + sigma sqrt(X) dW.  Rejects a <= 0 or sigma <= 0.
CirCondition check_cir_condition(double a, double b, double sigma);

}
