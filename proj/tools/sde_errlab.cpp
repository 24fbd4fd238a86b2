// Command line front end.  Exit codes: 0 success, 2 configuration error,
// 3 domain error (an experiment became numerically untrustworthy),
// 4 experiment ran but its built-in checks failed under --check.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sdelab/errors.hpp"
#include "sdelab/experiment.hpp"
#include "sdelab/version.hpp"

namespace {

using sdelab::ConfigError;
using sdelab::DomainError;
using sdelab::experiment::Config;

struct SubState {
    CLI::App* cmd = nullptr;
    std::string config_file;
    std::string model;
    std::vector<std::string> params;
    double x0 = 0.0;
    double horizon = 1.0;
    std::vector<std::size_t> n_list;
    std::size_t n = 0;
    std::size_t paths = 0;
    std::uint64_t seed = 0;
    std::size_t refinement = 0;
    int workers = 0;
    std::string schemes;
    std::string format;
    std::string output;
    bool check = false;
    std::string dump_path;
    std::string dump_traj;
};

void attach_common(SubState& s, bool with_n_list, bool with_n) {
    CLI::App* cmd = s.cmd;
    cmd->add_option("--config", s.config_file,
                    "JSON file with the same keys as the flags");
    cmd->add_option("--model", s.model, "model name (see list-models)");
    cmd->add_option("--param", s.params,
                    "model parameter as key=value, repeatable");
    cmd->add_option("--x0", s.x0, "initial state (default: model specific)");
    cmd->add_option("--t", s.horizon, "time horizon");
    if (with_n_list)
        cmd->add_option("--n-list", s.n_list,
                        "coarse step counts, powers of two, increasing")
            ->delimiter(',');
    if (with_n) cmd->add_option("--n", s.n, "coarse step count, power of two");
    cmd->add_option("--paths", s.paths, "Monte Carlo sample size");
    cmd->add_option("--seed", s.seed, "master seed");
    cmd->add_option("--refinement", s.refinement,
                    "fine grid oversampling factor, power of two");
    cmd->add_option("--workers", s.workers,
                    "worker threads, 0 = SDE_ERRLAB_WORKERS or hardware");
    cmd->add_option("--schemes", s.schemes,
                    "comma list of euler, milstein, symmetrized_euler");
    cmd->add_option("--format", s.format, "csv or json");
    cmd->add_option("--output", s.output, "output file, - for stdout");
    cmd->add_flag("--check", s.check,
                  "exit 4 when the built-in result checks fail");
    cmd->add_option("--dump-path", s.dump_path,
                    "write the first driving path to this CSV file");
    cmd->add_option("--dump-traj", s.dump_traj,
                    "write the first coarse trajectory to this CSV file");
}

std::map<std::string, double> parse_params(
    const std::vector<std::string>& kvs) {
    std::map<std::string, double> out;
    for (const auto& kv : kvs) {
        const auto pos = kv.find('=');
        if (pos == std::string::npos || pos == 0)
            throw ConfigError("--param expects key=value, got '" + kv + "'");
        const std::string key = kv.substr(0, pos);
        const std::string val = kv.substr(pos + 1);
        try {
            std::size_t used = 0;
            const double v = std::stod(val, &used);
            if (used != val.size())
                throw ConfigError("--param " + key + ": trailing characters in '" +
                                  val + "'");
            out[key] = v;
        } catch (const std::invalid_argument&) {
            throw ConfigError("--param " + key + ": '" + val +
                              "' is not a number");
        } catch (const std::out_of_range&) {
            throw ConfigError("--param " + key + ": '" + val +
                              "' is out of range");
        }
    }
    return out;
}

Config build_config(const std::string& experiment, const SubState& s) {
    Config cfg;
    cfg.experiment = experiment;
    if (!s.config_file.empty()) {
        std::ifstream in(s.config_file);
        if (!in) throw ConfigError("cannot open config file " + s.config_file);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("cannot parse config file " + s.config_file +
                              ": " + e.what());
        }
        cfg = sdelab::experiment::config_from_json(j, experiment);
        if (cfg.experiment != experiment)
            throw ConfigError("config file is for experiment '" +
                              cfg.experiment + "', not '" + experiment + "'");
    }

    // command line flags override the config file
    const CLI::App* cmd = s.cmd;
    auto given = [cmd](const std::string& name) {
        return cmd->count(name) > 0;
    };
    if (given("--model")) cfg.model = s.model;
    if (given("--param")) {
        for (const auto& [k, v] : parse_params(s.params)) cfg.params[k] = v;
    }
    if (given("--x0")) cfg.x0 = s.x0;
    if (given("--t")) cfg.horizon = s.horizon;
    if (cmd->get_option_no_throw("--n-list") && given("--n-list"))
        cfg.n_list = s.n_list;
    if (cmd->get_option_no_throw("--n") && given("--n")) cfg.n = s.n;
    if (given("--paths")) cfg.paths = s.paths;
    if (given("--seed")) cfg.seed = s.seed;
    if (given("--refinement")) cfg.refinement = s.refinement;
    if (given("--workers")) cfg.workers = s.workers;
    if (given("--schemes")) cfg.schemes = s.schemes;
    if (given("--format")) cfg.format = s.format;
    if (given("--output")) cfg.output = s.output;
    if (s.check) cfg.check = true;
    if (given("--dump-path")) cfg.dump_path_file = s.dump_path;
    if (given("--dump-traj")) cfg.dump_traj_file = s.dump_traj;
    return cfg;
}

void write_file_or_stdout(const std::string& target, const std::string& text) {
    if (target == "-" || target.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(target);
    if (!out) throw ConfigError("cannot open output file " + target);
    out << text;
    if (!out) throw ConfigError("failed writing output file " + target);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sde-errlab: discretization error laboratory for SDE schemes"};
    app.set_version_flag("--version", std::string(sdelab::kVersion));
    app.require_subcommand(1);

    std::vector<std::unique_ptr<SubState>> states;
    auto add_sub = [&](const std::string& name, const std::string& desc,
                       bool with_n_list, bool with_n) -> SubState& {
        auto st = std::make_unique<SubState>();
        st->cmd = app.add_subcommand(name, desc);
        attach_common(*st, with_n_list, with_n);
        states.push_back(std::move(st));
        return *states.back();
    };

    add_sub("strong-rate",
            "pathwise sup error of coarse schemes against a fine reference",
            true, false);
    add_sub("error-law",
            "normalized terminal error against the simulated limit law", false,
            true);
    add_sub("zstats", "grid functionals of the driving path", false, true);
    add_sub("moments", "moment diagnostics of the simulated limit process",
            false, true);
    add_sub("weak-error",
            "weak error of a bounded Lipschitz functional with a log-rate bound",
            true, false);

    SubState list_state;
    list_state.cmd = app.add_subcommand("list-models", "available models");
    list_state.cmd->add_option("--format", list_state.format, "csv or json");
    list_state.cmd->add_option("--output", list_state.output,
                               "output file, - for stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        Config cfg;
        if (list_state.cmd->parsed()) {
            cfg.experiment = "list-models";
            if (list_state.cmd->count("--format") > 0)
                cfg.format = list_state.format;
            if (list_state.cmd->count("--output") > 0)
                cfg.output = list_state.output;
        } else {
            for (const auto& st : states) {
                if (st->cmd->parsed()) {
                    cfg = build_config(st->cmd->get_name(), *st);
                    break;
                }
            }
        }

        auto res = sdelab::experiment::run_experiment(cfg);
        write_file_or_stdout(cfg.output, res.report);
        if (!cfg.dump_path_file.empty())
            write_file_or_stdout(cfg.dump_path_file,
                                 res.data.at("dump_path_csv").get<std::string>());
        if (!cfg.dump_traj_file.empty())
            write_file_or_stdout(cfg.dump_traj_file,
                                 res.data.at("dump_traj_csv").get<std::string>());
        if (cfg.check && !res.checks_passed) {
            std::cerr << "sde-errlab: built-in checks failed\n";
            return 4;
        }
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "sde-errlab: config error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "sde-errlab: domain error: " << e.what() << "\n";
        return 3;
    }
}
