#include "sdelab/montecarlo.hpp"

#include <cstdlib>
#include <exception>
#include <string>
#include <thread>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "sdelab/errors.hpp"

namespace sdelab::mc {

int default_workers() {
    if (const char* env = std::getenv("SDE_ERRLAB_WORKERS")) {
        try {
            const int n = std::stoi(env);
            if (n >= 1) return n;
        } catch (const std::exception&) {
            throw ConfigError("SDE_ERRLAB_WORKERS is not a positive integer: " +
                              std::string(env));
        }
        throw ConfigError("SDE_ERRLAB_WORKERS is not a positive integer: " +
                          std::string(env));
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

int resolve_workers(int requested) {
    return requested > 0 ? requested : default_workers();
}

void run_indexed(std::size_t count, int workers,
                 const std::function<void(std::size_t)>& body) {
    if (workers < 1)
        throw ConfigError("run_indexed: worker count must be at least 1");
    std::exception_ptr first_error;
#ifdef _OPENMP
    const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 8) num_threads(workers)
    for (long long i = 0; i < n; ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(sdelab_mc_error)
            if (!first_error) first_error = std::current_exception();
        }
    }
#else
    (void)workers;
    for (std::size_t i = 0; i < count; ++i) {
        try {
            body(i);
        } catch (...) {
            if (!first_error) first_error = std::current_exception();
            break;
        }
    }
#endif
    if (first_error) std::rethrow_exception(first_error);
}

void run_indexed_serial(std::size_t count,
                        const std::function<void(std::size_t)>& body) {
    for (std::size_t i = 0; i < count; ++i) body(i);
}

}
