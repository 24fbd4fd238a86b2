#include "sdelab/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "sdelab/erroranalysis.hpp"
#include "sdelab/errors.hpp"
#include "sdelab/limitlaw.hpp"
#include "sdelab/model.hpp"
#include "sdelab/montecarlo.hpp"
#include "sdelab/path.hpp"
#include "sdelab/reference.hpp"
#include "sdelab/rng.hpp"
#include "sdelab/scheme.hpp"
#include "sdelab/statkit.hpp"
#include "sdelab/version.hpp"
#include "sdelab/weakerror.hpp"

namespace sdelab::experiment {

namespace {

// ==================================================================
// formatting helpers
// ==================================================================

std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool is_pow2(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

// ==================================================================
// configuration validation
// ==================================================================

const std::vector<std::string>& known_experiments() {
    static const std::vector<std::string> v = {
        "strong-rate", "error-law", "zstats",
        "moments",     "weak-error", "list-models"};
    return v;
}

struct Prepared {
    model::Model model;
    double x0 = 0.0;
    std::vector<scheme::SchemeKind> schemes;        // schemes under study
    reference::RefMethod ref_method = reference::RefMethod::fine_milstein;
};

Prepared prepare(const Config& cfg) {
    if (std::find(known_experiments().begin(), known_experiments().end(),
                  cfg.experiment) == known_experiments().end()) {
        throw ConfigError("unknown experiment '" + cfg.experiment + "'");
    }
    if (!(cfg.horizon > 0.0) || !std::isfinite(cfg.horizon))
        throw ConfigError("horizon must be positive and finite");
    if (cfg.paths == 0) throw ConfigError("paths must be positive");
    if (!is_pow2(cfg.refinement))
        throw ConfigError("refinement must be a power of two");
    if (cfg.workers < 0) throw ConfigError("workers must be >= 0");
    if (!cfg.format.empty() && cfg.format != "csv" && cfg.format != "json")
        throw ConfigError("format must be csv or json");

    const bool uses_n_list =
        cfg.experiment == "strong-rate" || cfg.experiment == "weak-error";
    if (uses_n_list) {
        if (cfg.n_list.empty()) throw ConfigError("n_list must not be empty");
        for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
            if (!is_pow2(cfg.n_list[i]))
                throw ConfigError("n_list entries must be powers of two");
            if (i > 0 && cfg.n_list[i] <= cfg.n_list[i - 1])
                throw ConfigError("n_list must be strictly increasing");
        }
    } else if (cfg.experiment != "list-models") {
        if (cfg.n == 0) throw ConfigError("n must be positive");
        if (!is_pow2(cfg.n))
            throw ConfigError("n must be a power of two");
    }

    Prepared p;
    if (cfg.experiment == "list-models") return p;

    p.model = model::make_model(cfg.model, cfg.params);
    p.x0 = std::isnan(cfg.x0) ? p.model.default_x0 : cfg.x0;
    if (p.model.domain == model::StateDomain::positive_half_line &&
        !(p.x0 > 0.0)) {
        throw ConfigError("model '" + p.model.name +
                          "' lives on the positive half line; x0 must be > 0");
    }
    if (!std::isfinite(p.x0)) throw ConfigError("x0 must be finite");

    const bool half = p.model.domain == model::StateDomain::positive_half_line;
    if (!cfg.schemes.empty()) {
        for (const auto& name : split_csv(cfg.schemes))
            p.schemes.push_back(scheme::scheme_from_name(name));
        if (p.schemes.empty()) throw ConfigError("schemes list is empty");
    } else if (half) {
        p.schemes = {scheme::SchemeKind::symmetrized_euler};
    } else {
        p.schemes = {scheme::SchemeKind::euler, scheme::SchemeKind::milstein};
    }
    p.ref_method = reference::choose_ref_method(p.model);
    return p;
}

// Drift identically zero on the sampled state window: the error process mean
// should then vanish and the mean-zero diagnostic becomes a hard check.
bool is_martingale_model(const model::Model& m, double x0) {
    const bool half = m.domain == model::StateDomain::positive_half_line;
    const double lo = half ? 1e-3 : -10.0;
    const double hi = std::max(10.0, 2.0 * std::fabs(x0));
    for (int i = 0; i <= 40; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / 40.0;
        if (m.drift(x) != 0.0) return false;
    }
    return true;
}

// ==================================================================
// provenance (everything needed to reproduce the run; never the
// worker count, which must not affect any output byte)
// ==================================================================

nlohmann::json provenance(const Config& cfg, const Prepared& p,
                          bool with_n_list) {
    nlohmann::json j;
    j["version"] = kVersion;
    j["experiment"] = cfg.experiment;
    j["model"] = p.model.name;
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [k, v] : p.model.params) params[k] = v;
    j["params"] = params;
    j["x0"] = p.x0;
    j["horizon"] = cfg.horizon;
    j["seed"] = cfg.seed;
    j["refinement"] = cfg.refinement;
    j["paths"] = cfg.paths;
    if (with_n_list)
        j["n_list"] = cfg.n_list;
    else
        j["n"] = cfg.n;
    return j;
}

void csv_provenance(std::ostringstream& os, const nlohmann::json& prov) {
    os << "# sde-errlab " << kVersion << " experiment="
       << prov.at("experiment").get<std::string>() << "\n";
    os << "# model=" << prov.at("model").get<std::string>();
    const auto& params = prov.at("params");
    if (!params.empty()) {
        os << " params:";
        for (auto it = params.begin(); it != params.end(); ++it)
            os << " " << it.key() << "=" << num(it.value().get<double>());
    }
    os << "\n";
    os << "# x0=" << num(prov.at("x0").get<double>())
       << " horizon=" << num(prov.at("horizon").get<double>())
       << " seed=" << prov.at("seed").get<std::uint64_t>()
       << " refinement=" << prov.at("refinement").get<std::size_t>()
       << " paths=" << prov.at("paths").get<std::size_t>() << "\n";
    if (prov.contains("reference"))
        os << "# reference=" << prov.at("reference").get<std::string>() << "\n";
}

// Reference self-consistency gate shared by the sampling experiments.  A
// failing ladder means the fine grid is too coarse to trust, which is a data
// problem rather than a configuration problem.
void require_reference_ladder(const model::Model& m, double x0, double horizon,
                              std::size_t n_fine, std::size_t n_coarsest,
                              scheme::SchemeKind kind, std::uint64_t seed,
                              int workers, nlohmann::json* out) {
    auto lc = reference::reference_ladder_check(m, x0, horizon, n_fine,
                                                n_coarsest, kind, seed, 500,
                                                workers);
    if (out) {
        nlohmann::json j;
        j["scheme"] = scheme::scheme_name(kind);
        j["gap_rms"] = lc.gap_rms;
        j["scheme_error_rms"] = lc.scheme_error_rms;
        j["saturated_paths"] = lc.saturated_paths;
        j["pass"] = lc.pass;
        out->push_back(j);
    }
    if (!lc.pass) {
        throw DomainError(
            "reference grid too coarse for scheme '" +
            std::string(scheme::scheme_name(kind)) + "': doubling the fine grid moves the terminal value by rms " +
            num(lc.gap_rms) + " against a coarsest scheme error rms of " +
            num(lc.scheme_error_rms));
    }
}

void require_limit_ladder(const model::Model& m, double x0, double horizon,
                          std::size_t n_fine, std::uint64_t seed, int workers,
                          nlohmann::json* out) {
    auto lc =
        limitlaw::limit_ladder_check(m, x0, horizon, n_fine, seed, 500, workers);
    if (out) {
        nlohmann::json j;
        j["kind"] = "limit";
        j["gap_median"] = lc.gap_median;
        j["scale_median"] = lc.scale_median;
        j["pass"] = lc.pass;
        out->push_back(j);
    }
    if (!lc.pass) {
        throw DomainError(
            "limit simulation grid too coarse: doubling it moves the terminal "
            "value by median " +
            num(lc.gap_median) + " against a scale of " + num(lc.scale_median));
    }
}

// ==================================================================
// strong-rate
// ==================================================================

RunResult run_strong_rate(const Config& cfg, const Prepared& p) {
    const std::size_t n_max = cfg.n_list.back();
    const std::size_t n_fine = cfg.refinement * n_max;
    const std::size_t nq = cfg.n_list.size();
    const std::size_t ns = p.schemes.size();
    const int workers = mc::resolve_workers(cfg.workers);

    nlohmann::json ladder = nlohmann::json::array();
    if (p.ref_method != reference::RefMethod::exact_gbm) {
        for (auto kind : p.schemes)
            require_reference_ladder(p.model, p.x0, cfg.horizon, n_fine,
                                     cfg.n_list.front(), kind, cfg.seed,
                                     workers, &ladder);
    }

    // slot layout: [scheme][n][path]
    std::vector<std::vector<std::vector<double>>> sup(
        ns, std::vector<std::vector<double>>(nq,
                                             std::vector<double>(cfg.paths)));
    auto term = sup;
    auto norm_term = sup;

    mc::run_indexed(cfg.paths, workers, [&](std::size_t pidx) {
        auto grid = path::generate_grid(cfg.seed, path::stream::kSchemeW + pidx,
                                        cfg.horizon, n_fine);
        auto ref = reference::make_reference(p.model, p.x0, grid);
        for (std::size_t s = 0; s < ns; ++s) {
            for (std::size_t q = 0; q < nq; ++q) {
                auto traj = scheme::run_scheme(p.schemes[s], p.model, p.x0,
                                               grid, cfg.n_list[q]);
                auto es = erroranalysis::error_sample(traj, ref, grid);
                sup[s][q][pidx] = es.sup_error;
                term[s][q][pidx] = es.terminal_error;
                norm_term[s][q][pidx] = es.normalized_terminal;
            }
        }
    });

    nlohmann::json prov = provenance(cfg, p, true);
    prov["reference"] = reference::ref_method_name(p.ref_method);
    nlohmann::json schemes_json = nlohmann::json::array();
    for (auto kind : p.schemes) schemes_json.push_back(scheme::scheme_name(kind));
    prov["schemes"] = schemes_json;

    std::ostringstream os;
    csv_provenance(os, prov);
    os << "scheme,n,paths,rms_sup,rms_sup_se,rms_terminal,mean_Un,var_Un\n";

    nlohmann::json rows = nlohmann::json::array();
    nlohmann::json fits = nlohmann::json::array();
    for (std::size_t s = 0; s < ns; ++s) {
        std::vector<double> rms_by_n(nq);
        for (std::size_t q = 0; q < nq; ++q) {
            const double rms_sup = statkit::rms(sup[s][q]);
            const double rms_sup_se = statkit::rms_jackknife_se(sup[s][q]);
            const double rms_term = statkit::rms(term[s][q]);
            auto un = statkit::summarize(norm_term[s][q]);
            rms_by_n[q] = rms_sup;

            os << scheme::scheme_name(p.schemes[s]) << "," << cfg.n_list[q]
               << "," << cfg.paths << "," << num(rms_sup) << ","
               << num(rms_sup_se) << "," << num(rms_term) << ","
               << num(un.mean) << "," << num(un.variance) << "\n";

            nlohmann::json row;
            row["scheme"] = scheme::scheme_name(p.schemes[s]);
            row["n"] = cfg.n_list[q];
            row["paths"] = cfg.paths;
            row["rms_sup"] = rms_sup;
            row["rms_sup_se"] = rms_sup_se;
            row["rms_terminal"] = rms_term;
            row["mean_Un"] = un.mean;
            row["var_Un"] = un.variance;
            // second moment of the normalized sup error, useful for checking
            // that sqrt(n)-scaling stabilizes
            std::vector<double> nsup(cfg.paths);
            const double root_n = std::sqrt(static_cast<double>(cfg.n_list[q]));
            for (std::size_t i = 0; i < cfg.paths; ++i)
                nsup[i] = root_n * sup[s][q][i];
            row["norm_sup_m2"] = statkit::rms(nsup) * statkit::rms(nsup);
            rows.push_back(row);
        }
        auto fit = erroranalysis::fit_rate(cfg.n_list, rms_by_n);
        os << "# ratefit scheme=" << scheme::scheme_name(p.schemes[s])
           << " alpha=" << num(fit.alpha) << " intercept=" << num(fit.intercept)
           << " r2=" << num(fit.r2) << " alpha_se=" << num(fit.slope_se)
           << "\n";
        nlohmann::json fj;
        fj["scheme"] = scheme::scheme_name(p.schemes[s]);
        fj["alpha"] = fit.alpha;
        fj["intercept"] = fit.intercept;
        fj["r2"] = fit.r2;
        fj["alpha_se"] = fit.slope_se;
        fits.push_back(fj);
    }

    nlohmann::json data;
    data["provenance"] = prov;
    data["rows"] = rows;
    data["fits"] = fits;
    if (!ladder.empty()) data["reference_ladder"] = ladder;

    RunResult out;
    out.format = cfg.format.empty() ? "csv" : cfg.format;
    out.data = data;
    out.report = out.format == "json" ? data.dump(2) + "\n" : os.str();
    out.checks_passed = true;
    for (const auto& fj : fits)
        if (fj.at("r2").get<double>() < 0.9) out.checks_passed = false;
    return out;
}

// ==================================================================
// error-law
// ==================================================================

std::vector<double> default_checkpoints(double horizon) {
    return {0.25 * horizon, 0.5 * horizon, 0.75 * horizon, horizon};
}

nlohmann::json checkpoints_json(const limitlaw::MomentReport& mr) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& row : mr.checkpoints) {
        nlohmann::json j;
        j["t"] = row.t;
        j["mean"] = row.mean;
        j["se_mean"] = row.se_mean;
        j["m2"] = row.m2;
        j["se_m2"] = row.se_m2;
        j["m2_max"] = row.m2_max;
        j["se_m2_max"] = row.se_m2_max;
        arr.push_back(j);
    }
    return arr;
}

nlohmann::json heavy_tail_json(const limitlaw::MomentReport& mr) {
    nlohmann::json j;
    j["estimated"] = mr.tail.estimated;
    j["alpha"] = mr.tail.alpha;
    j["ci_low"] = mr.tail.ci_low;
    j["ci_high"] = mr.tail.ci_high;
    j["k"] = mr.tail.k;
    j["infinite_variance"] = mr.tail.infinite_variance;
    return j;
}

RunResult run_error_law(const Config& cfg, const Prepared& p) {
    const std::size_t n_fine = cfg.refinement * cfg.n;
    const int workers = mc::resolve_workers(cfg.workers);
    const scheme::SchemeKind kind = p.schemes.front();

    nlohmann::json ladder = nlohmann::json::array();
    if (p.ref_method != reference::RefMethod::exact_gbm)
        require_reference_ladder(p.model, p.x0, cfg.horizon, n_fine, cfg.n,
                                 kind, cfg.seed, workers, &ladder);
    require_limit_ladder(p.model, p.x0, cfg.horizon, n_fine, cfg.seed, workers,
                         &ladder);

    auto samples = limitlaw::sample_error_law(
        p.model, p.x0, cfg.horizon, cfg.n, cfg.refinement, cfg.paths, cfg.seed,
        kind, default_checkpoints(cfg.horizon), workers, true);
    auto ks = statkit::ks_two_sample(samples.scheme_un, samples.limit_terminal);
    auto mr = limitlaw::moment_diagnostics(samples);
    const bool martingale = is_martingale_model(p.model, p.x0);

    nlohmann::json prov = provenance(cfg, p, false);
    prov["reference"] = reference::ref_method_name(p.ref_method);
    prov["scheme"] = scheme::scheme_name(kind);
    prov["checkpoints"] = samples.checkpoints;

    nlohmann::json data;
    data["provenance"] = prov;
    nlohmann::json ksj;
    ksj["d"] = ks.d;
    ksj["critical_05"] = ks.critical_05;
    ksj["pass"] = ks.pass;
    ksj["m"] = samples.scheme_un.size();
    ksj["n"] = samples.limit_terminal.size();
    data["ks"] = ksj;
    data["checkpoints"] = checkpoints_json(mr);
    data["heavy_tail"] = heavy_tail_json(mr);
    data["limit_stopped_paths"] = samples.limit_stopped_paths;
    data["scheme_saturated_paths"] = samples.scheme_saturated_paths;
    if (!ladder.empty()) data["ladders"] = ladder;

    nlohmann::json checks;
    checks["ks_pass"] = ks.pass;
    checks["m2_le_m2_max"] = mr.m2_le_m2_max;
    checks["m2_max_nondecreasing"] = mr.m2_max_nondecreasing;
    checks["martingale_model"] = martingale;
    checks["mean_zero_ok"] = mr.mean_zero_ok;
    bool passed = ks.pass && mr.m2_le_m2_max && mr.m2_max_nondecreasing;
    if (martingale) passed = passed && mr.mean_zero_ok;
    checks["passed"] = passed;
    data["checks"] = checks;

    RunResult out;
    out.format = cfg.format.empty() ? "json" : cfg.format;
    if (out.format == "csv")
        throw ConfigError("error-law reports are json only");
    out.data = data;
    out.report = data.dump(2) + "\n";
    out.checks_passed = passed;
    return out;
}

// ==================================================================
// zstats
// ==================================================================

RunResult run_zstats(const Config& cfg, const Prepared& p) {
    const std::size_t n_fine = cfg.refinement * cfg.n;
    const int workers = mc::resolve_workers(cfg.workers);

    std::vector<double> z11(cfg.paths), z12(cfg.paths), z21(cfg.paths),
        z22(cfg.paths), synthetic(cfg.paths);
    mc::run_indexed(cfg.paths, workers, [&](std::size_t pidx) {
        auto grid = path::generate_grid(cfg.seed, path::stream::kSchemeW + pidx,
                                        cfg.horizon, n_fine);
        auto z = erroranalysis::z_functionals(grid, cfg.n);
        z11[pidx] = z.z11;
        z12[pidx] = z.z12;
        z21[pidx] = z.z21;
        z22[pidx] = z.z22;
        synthetic[pidx] = rng::normal(cfg.seed, path::stream::kSynthetic + pidx, 0);
    });

    const double z11_closed =
        erroranalysis::z11_closed_form(cfg.horizon, cfg.n);
    double z11_dev = 0.0;
    for (double v : z11) z11_dev = std::max(z11_dev, std::fabs(v - z11_closed));

    // sqrt(2)/T * z22 is standard normal for every n
    std::vector<double> z22_std(cfg.paths);
    for (std::size_t i = 0; i < cfg.paths; ++i)
        z22_std[i] = std::sqrt(2.0) / cfg.horizon * z22[i];
    auto ks = statkit::ks_two_sample(z22_std, synthetic);
    auto z22_sum = statkit::summarize(z22);
    const double var_expected = cfg.horizon * cfg.horizon / 2.0;

    const double rms12 = statkit::rms(z12);
    const double rms21 = statkit::rms(z21);
    const double rms22 = statkit::rms(z22);

    const bool z11_ok = z11_dev <= 1e-12;
    const bool var_ok = std::fabs(z22_sum.variance - var_expected) <=
                        4.0 * std::max(z22_sum.se_variance, 1e-300);
    const bool cross_small = rms12 < rms22 / 5.0 && rms21 < rms22 / 5.0;
    const bool passed = ks.pass && z11_ok && var_ok && cross_small;

    nlohmann::json data;
    data["provenance"] = provenance(cfg, p, false);
    data["z11"] = z11[0];
    data["z11_closed_form"] = z11_closed;
    data["z11_max_abs_dev"] = z11_dev;
    data["z12_rms"] = rms12;
    data["z21_rms"] = rms21;
    data["z22_rms"] = rms22;
    data["z22_mean"] = z22_sum.mean;
    data["z22_var"] = z22_sum.variance;
    data["z22_var_se"] = z22_sum.se_variance;
    data["z22_var_expected"] = var_expected;
    nlohmann::json ksj;
    ksj["d"] = ks.d;
    ksj["critical_05"] = ks.critical_05;
    ksj["pass"] = ks.pass;
    data["ks_standardized_z22"] = ksj;
    nlohmann::json checks;
    checks["z11_matches_closed_form"] = z11_ok;
    checks["z22_gaussian_ks"] = ks.pass;
    checks["z22_variance_ok"] = var_ok;
    checks["cross_terms_small"] = cross_small;
    checks["passed"] = passed;
    data["checks"] = checks;

    RunResult out;
    out.format = cfg.format.empty() ? "json" : cfg.format;
    if (out.format == "csv") throw ConfigError("zstats reports are json only");
    out.data = data;
    out.report = data.dump(2) + "\n";
    out.checks_passed = passed;
    return out;
}

// ==================================================================
// moments
// ==================================================================

RunResult run_moments(const Config& cfg, const Prepared& p) {
    const std::size_t n_fine = cfg.refinement * cfg.n;
    const int workers = mc::resolve_workers(cfg.workers);

    nlohmann::json ladder = nlohmann::json::array();
    require_limit_ladder(p.model, p.x0, cfg.horizon, n_fine, cfg.seed, workers,
                         &ladder);

    auto samples = limitlaw::sample_error_law(
        p.model, p.x0, cfg.horizon, cfg.n, cfg.refinement, cfg.paths, cfg.seed,
        p.schemes.front(), default_checkpoints(cfg.horizon), workers, false);
    auto mr = limitlaw::moment_diagnostics(samples);
    const bool martingale = is_martingale_model(p.model, p.x0);

    nlohmann::json prov = provenance(cfg, p, false);
    prov["checkpoints"] = samples.checkpoints;

    nlohmann::json data;
    data["provenance"] = prov;
    data["checkpoints"] = checkpoints_json(mr);
    data["heavy_tail"] = heavy_tail_json(mr);
    data["limit_stopped_paths"] = samples.limit_stopped_paths;
    data["ladders"] = ladder;

    nlohmann::json checks;
    checks["m2_le_m2_max"] = mr.m2_le_m2_max;
    checks["m2_max_nondecreasing"] = mr.m2_max_nondecreasing;
    checks["martingale_model"] = martingale;
    checks["mean_zero_ok"] = mr.mean_zero_ok;
    bool passed = mr.m2_le_m2_max && mr.m2_max_nondecreasing;
    if (martingale) passed = passed && mr.mean_zero_ok;
    checks["passed"] = passed;
    data["checks"] = checks;

    RunResult out;
    out.format = cfg.format.empty() ? "json" : cfg.format;
    if (out.format == "csv") throw ConfigError("moments reports are json only");
    out.data = data;
    out.report = data.dump(2) + "\n";
    out.checks_passed = passed;
    return out;
}

// ==================================================================
// weak-error
// ==================================================================

RunResult run_weak_error(const Config& cfg, const Prepared& p) {
    const std::size_t n_fine = cfg.refinement * cfg.n_list.back();
    const int workers = mc::resolve_workers(cfg.workers);
    const scheme::SchemeKind kind = p.schemes.front();

    nlohmann::json ladder = nlohmann::json::array();
    if (p.ref_method != reference::RefMethod::exact_gbm)
        require_reference_ladder(p.model, p.x0, cfg.horizon, n_fine,
                                 cfg.n_list.front(), kind, cfg.seed, workers,
                                 &ladder);

    auto g = weakerror::clamp_functional(-1.0, 1.0);
    auto report = weakerror::estimate_weak_error(p.model, p.x0, cfg.horizon, g,
                                                 cfg.n_list, cfg.paths,
                                                 cfg.refinement, cfg.seed,
                                                 workers);

    // Running-maximum tail bound P(sup X > x) <= x0/x holds for nonnegative
    // local martingales; checked for the cev family, whose price process is
    // one.
    nlohmann::json tail = nlohmann::json::array();
    bool tail_ok = true;
    const bool is_cev = p.model.name.rfind("cev", 0) == 0;
    if (is_cev) {
        const std::vector<double> thresholds = {2.0 * p.x0, 4.0 * p.x0,
                                                8.0 * p.x0};
        auto rows = weakerror::tail_probability_check(report.sup_samples, p.x0,
                                                      thresholds);
        for (const auto& row : rows) {
            nlohmann::json j;
            j["x"] = row.threshold;
            j["fraction"] = row.fraction;
            j["ci_low"] = row.ci_low;
            j["ci_high"] = row.ci_high;
            j["bound"] = row.bound;
            j["pass"] = row.pass;
            tail.push_back(j);
            tail_ok = tail_ok && row.pass;
        }
    }

    nlohmann::json prov = provenance(cfg, p, true);
    prov["reference"] = reference::ref_method_name(p.ref_method);
    prov["scheme"] = scheme::scheme_name(kind);
    prov["functional"] = "clamp(-1,1)";

    nlohmann::json rows = nlohmann::json::array();
    std::ostringstream os;
    csv_provenance(os, prov);
    os << "n,estimate,se,bound_curve\n";
    for (const auto& row : report.rows) {
        os << row.n << "," << num(row.estimate) << "," << num(row.se) << ","
           << num(row.bound) << "\n";
        nlohmann::json j;
        j["n"] = row.n;
        j["estimate"] = row.estimate;
        j["se"] = row.se;
        j["bound_curve"] = row.bound;
        rows.push_back(j);
    }

    nlohmann::json flags;
    flags["noise_floor"] = report.noise_floor;
    flags["nonincreasing_ok"] = report.nonincreasing_ok;
    flags["bound_ok"] = report.bound_ok;
    flags["tail_ok"] = tail_ok;
    const bool passed = report.nonincreasing_ok && report.bound_ok && tail_ok;
    flags["passed"] = passed;

    nlohmann::json data;
    data["provenance"] = prov;
    data["rows"] = rows;
    data["bound_constant"] = report.bound_constant;
    data["nu"] = report.nu;
    data["kappa"] = report.kappa;
    data["growth_exponent"] = report.growth_exponent;
    data["saturated_paths"] = report.saturated_paths;
    data["flags"] = flags;
    if (is_cev) data["tail"] = tail;
    if (!ladder.empty()) data["reference_ladder"] = ladder;

    nlohmann::json summary;
    summary["C"] = report.bound_constant;
    summary["nu"] = report.nu;
    summary["kappa"] = report.kappa;
    summary["flags"] = flags;
    if (is_cev) summary["tail"] = tail;
    os << "# summary " << summary.dump() << "\n";

    RunResult out;
    out.format = cfg.format.empty() ? "csv" : cfg.format;
    out.data = data;
    out.report = out.format == "json" ? data.dump(2) + "\n" : os.str();
    out.checks_passed = passed;
    return out;
}

// ==================================================================
// list-models
// ==================================================================

RunResult run_list_models(const Config& cfg) {
    struct Entry {
        const char* name;
        const char* domain;
        const char* drift;
        const char* diffusion;
        const char* params;
    };
    static const Entry entries[] = {
        {"gbm", "whole_line", "mu*x", "sigma*x", "mu=0.5 sigma=0.4"},
        {"ou", "whole_line", "-theta*x", "sigma", "theta=1 sigma=1"},
        {"bounded_sine", "whole_line", "0", "2+sin(x)", ""},
        {"abs_drift", "whole_line", "|x|", "2+sin(x)", ""},
        {"inverse_bessel", "positive_half_line", "0", "x^2", ""},
        {"cir", "positive_half_line", "a-b*x", "sigma*sqrt(x)",
         "a=1 b=0.01 sigma=0.1"},
        {"cev", "positive_half_line", "0", "b*x^beta", "b=1 beta=2"},
    };

    nlohmann::json arr = nlohmann::json::array();
    std::ostringstream os;
    os << "# sde-errlab " << kVersion << " models\n";
    os << "name,domain,drift,diffusion,default_params\n";
    for (const auto& e : entries) {
        os << e.name << "," << e.domain << "," << e.drift << "," << e.diffusion
           << "," << e.params << "\n";
        nlohmann::json j;
        j["name"] = e.name;
        j["domain"] = e.domain;
        j["drift"] = e.drift;
        j["diffusion"] = e.diffusion;
        j["default_params"] = e.params;
        arr.push_back(j);
    }

    nlohmann::json data;
    data["version"] = kVersion;
    data["models"] = arr;

    RunResult out;
    out.format = cfg.format.empty() ? "csv" : cfg.format;
    out.data = data;
    out.report = out.format == "json" ? data.dump(2) + "\n" : os.str();
    out.checks_passed = true;
    return out;
}

// ==================================================================
// optional dumps
// ==================================================================

std::size_t fine_grid_size(const Config& cfg) {
    if (cfg.experiment == "strong-rate" || cfg.experiment == "weak-error")
        return cfg.refinement * cfg.n_list.back();
    return cfg.refinement * cfg.n;
}

std::string dump_path_csv(const Config& cfg) {
    const std::size_t n_fine = fine_grid_size(cfg);
    auto grid =
        path::generate_grid(cfg.seed, path::stream::kSchemeW, cfg.horizon, n_fine);
    auto w = path::cumulative(grid);
    const double h = grid.step();
    std::ostringstream os;
    os << "t,W\n";
    for (std::size_t j = 0; j < w.size(); ++j)
        os << num(static_cast<double>(j) * h) << "," << num(w[j]) << "\n";
    return os.str();
}

std::string dump_traj_csv(const Config& cfg, const Prepared& p) {
    const std::size_t n_fine = fine_grid_size(cfg);
    const std::size_t n = (cfg.experiment == "strong-rate" ||
                           cfg.experiment == "weak-error")
                              ? cfg.n_list.front()
                              : cfg.n;
    auto grid =
        path::generate_grid(cfg.seed, path::stream::kSchemeW, cfg.horizon, n_fine);
    auto traj = scheme::run_scheme(p.schemes.front(), p.model, p.x0, grid, n);
    const double h = cfg.horizon / static_cast<double>(n);
    std::ostringstream os;
    os << "k,t,X\n";
    for (std::size_t k = 0; k < traj.values.size(); ++k)
        os << k << "," << num(static_cast<double>(k) * h) << ","
           << num(traj.values[k]) << "\n";
    return os.str();
}

}  // namespace

// ==================================================================
// public entry points
// ==================================================================

Config config_from_json(const nlohmann::json& j, const std::string& experiment) {
    if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
    Config cfg;
    cfg.experiment = experiment;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& key = it.key();
        try {
            if (key == "experiment") {
                cfg.experiment = it->get<std::string>();
            } else if (key == "model") {
                cfg.model = it->get<std::string>();
            } else if (key == "params") {
                if (!it->is_object())
                    throw ConfigError("params must be an object");
                for (auto pit = it->begin(); pit != it->end(); ++pit)
                    cfg.params[pit.key()] = pit->get<double>();
            } else if (key == "x0") {
                cfg.x0 = it->get<double>();
            } else if (key == "horizon") {
                cfg.horizon = it->get<double>();
            } else if (key == "n_list") {
                cfg.n_list = it->get<std::vector<std::size_t>>();
            } else if (key == "n") {
                cfg.n = it->get<std::size_t>();
            } else if (key == "paths") {
                cfg.paths = it->get<std::size_t>();
            } else if (key == "seed") {
                cfg.seed = it->get<std::uint64_t>();
            } else if (key == "refinement") {
                cfg.refinement = it->get<std::size_t>();
            } else if (key == "workers") {
                cfg.workers = it->get<int>();
            } else if (key == "schemes") {
                cfg.schemes = it->get<std::string>();
            } else if (key == "format") {
                cfg.format = it->get<std::string>();
            } else if (key == "output") {
                cfg.output = it->get<std::string>();
            } else if (key == "check") {
                cfg.check = it->get<bool>();
            } else {
                throw ConfigError("unknown config key '" + key + "'");
            }
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("bad value for config key '" + key +
                              "': " + e.what());
        }
    }
    return cfg;
}

RunResult run_experiment(const Config& cfg) {
    Prepared p = prepare(cfg);

    RunResult out;
    if (cfg.experiment == "list-models") {
        out = run_list_models(cfg);
    } else if (cfg.experiment == "strong-rate") {
        out = run_strong_rate(cfg, p);
    } else if (cfg.experiment == "error-law") {
        out = run_error_law(cfg, p);
    } else if (cfg.experiment == "zstats") {
        out = run_zstats(cfg, p);
    } else if (cfg.experiment == "moments") {
        out = run_moments(cfg, p);
    } else if (cfg.experiment == "weak-error") {
        out = run_weak_error(cfg, p);
    } else {
        throw ConfigError("unknown experiment '" + cfg.experiment + "'");
    }

    if (!cfg.dump_path_file.empty()) {
        if (cfg.experiment == "list-models")
            throw ConfigError("dump-path is not available for list-models");
        out.data["dump_path_csv"] = dump_path_csv(cfg);
    }
    if (!cfg.dump_traj_file.empty()) {
        if (cfg.experiment == "list-models" || cfg.experiment == "zstats" ||
            cfg.experiment == "moments")
            throw ConfigError("dump-traj is not available for experiment '" +
                              cfg.experiment + "'");
        out.data["dump_traj_csv"] = dump_traj_csv(cfg, p);
    }
    return out;
}

}  // namespace sdelab::experiment
