#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

// Experiment orchestration shared by the command line tool and the test
// suites.  Reports embed the experiment configuration but never the worker
// count: the same seed must produce byte-identical output no matter how the
// path loop is scheduled.

namespace sdelab::experiment {

struct Config {
    std::string experiment;  // strong-rate, error-law, zstats, moments,
                             // weak-error, list-models
    std::string model = "gbm";
    std::map<std::string, double> params;
    double x0 = std::numeric_limits<double>::quiet_NaN();  // NaN: model default
    double horizon = 1.0;
    std::vector<std::size_t> n_list = {16, 32, 64, 128, 256};
    std::size_t n = 1024;
    std::size_t paths = 1000;
    std::uint64_t seed = 42;
    std::size_t refinement = 64;  // fine grid = refinement * max step count
    int workers = 0;              // 0: SDE_ERRLAB_WORKERS env or hardware
    std::string schemes;          // optional comma list (strong-rate)
    std::string format;           // "", "csv", "json"
    std::string output = "-";
    bool check = false;
    std::string dump_path_file;
    std::string dump_traj_file;
};

struct RunResult {
    std::string report;
    std::string format;
    nlohmann::json data;  // structured mirror of the report
    bool checks_passed = true;
};

// Fills a Config from a JSON object with the same keys as the command line
// flags.  Unknown keys are rejected.
Config config_from_json(const nlohmann::json& j, const std::string& experiment);

RunResult run_experiment(const Config& cfg);

}
