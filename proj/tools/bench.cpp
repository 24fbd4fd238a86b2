// Benchmark of the OpenMP path loop against the serial reference loop.
// Both must produce bit-identical results; the checksum column proves it
// while the timing columns show the speedup.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>
#include <thread>
#include <vector>

#include "sdelab/erroranalysis.hpp"
#include "sdelab/model.hpp"
#include "sdelab/montecarlo.hpp"
#include "sdelab/path.hpp"
#include "sdelab/reference.hpp"
#include "sdelab/scheme.hpp"

namespace {

struct Workload {
    sdelab::model::Model model;
    double x0;
    double horizon;
    std::size_t n;
    std::size_t refinement;
    std::uint64_t seed;
    std::size_t paths;
};

double kernel(const Workload& w, std::size_t pidx) {
    auto grid = sdelab::path::generate_grid(w.seed,
                                            sdelab::path::stream::kSchemeW + pidx,
                                            w.horizon, w.refinement * w.n);
    auto ref = sdelab::reference::make_reference(w.model, w.x0, grid);
    auto traj = sdelab::scheme::run_scheme(sdelab::scheme::SchemeKind::euler,
                                           w.model, w.x0, grid, w.n);
    auto es = sdelab::erroranalysis::error_sample(traj, ref, grid);
    return es.sup_error;
}

double checksum(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc;
}

}  // namespace

int main(int argc, char** argv) {
    Workload w;
    w.model = sdelab::model::make_model("bounded_sine", {});
    w.x0 = 1.0;
    w.horizon = 1.0;
    w.n = 256;
    w.refinement = 64;
    w.seed = 42;
    w.paths = 200;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--paths") == 0 && i + 1 < argc)
            w.paths = std::stoul(argv[++i]);
        else if (std::strcmp(argv[i], "--n") == 0 && i + 1 < argc)
            w.n = std::stoul(argv[++i]);
    }

    std::vector<double> sup(w.paths);
    auto fill = [&](std::size_t pidx) { sup[pidx] = kernel(w, pidx); };

    using clock = std::chrono::steady_clock;
    auto t0 = clock::now();
    sdelab::mc::run_indexed_serial(w.paths, fill);
    auto t1 = clock::now();
    const double serial_ms =
        std::chrono::duration<double, std::milli>(t1 - t0).count();
    const double serial_sum = checksum(sup);

    std::printf("paths=%zu n=%zu fine=%zu model=%s\n", w.paths, w.n,
                w.refinement * w.n, w.model.name.c_str());
    std::printf("%-10s %12s %10s %8s\n", "mode", "time_ms", "speedup",
                "match");
    std::printf("%-10s %12.2f %10s %8s\n", "serial", serial_ms, "1.00x", "-");

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    std::vector<int> worker_counts = {1, 2, 4};
    if (static_cast<int>(hw) > 4) worker_counts.push_back(static_cast<int>(hw));
    bool all_match = true;
    for (int workers : worker_counts) {
        std::vector<double> par(w.paths);
        auto pf = [&](std::size_t pidx) { par[pidx] = kernel(w, pidx); };
        auto p0 = clock::now();
        sdelab::mc::run_indexed(w.paths, workers, pf);
        auto p1 = clock::now();
        const double ms =
            std::chrono::duration<double, std::milli>(p1 - p0).count();
        const bool match = par == sup && checksum(par) == serial_sum;
        all_match = all_match && match;
        char label[32];
        std::snprintf(label, sizeof label, "omp-%d", workers);
        std::printf("%-10s %12.2f %9.2fx %8s\n", label, ms, serial_ms / ms,
                    match ? "yes" : "NO");
    }
    if (!all_match) {
        std::printf("mismatch between serial and parallel results\n");
        return 1;
    }
    return 0;
}
