#include <doctest.h>

#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "sdelab/errors.hpp"
#include "sdelab/montecarlo.hpp"
#include "sdelab/rng.hpp"

using namespace sdelab;

namespace {

std::vector<double> fill_slots(std::size_t count, int workers) {
    std::vector<double> out(count);
    auto body = [&](std::size_t i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < 50; ++j)
            acc += rng::normal(11, i, j);
        out[i] = acc;
    };
    if (workers < 0)
        mc::run_indexed_serial(count, body);
    else
        mc::run_indexed(count, workers, body);
    return out;
}

struct EnvGuard {
    std::string name;
    std::string old_value;
    bool had = false;
    explicit EnvGuard(const char* n) : name(n) {
        if (const char* v = std::getenv(n)) {
            had = true;
            old_value = v;
        }
    }
    ~EnvGuard() {
        if (had)
            setenv(name.c_str(), old_value.c_str(), 1);
        else
            unsetenv(name.c_str());
    }
};

}

TEST_CASE("parallel slots equal the serial reference for any worker count") {
    auto serial = fill_slots(300, -1);
    for (int workers : {1, 2, 3, 8}) {
        auto par = fill_slots(300, workers);
        CHECK(par == serial);
    }
}

TEST_CASE("exceptions thrown by a path body propagate") {
    auto boom = [](std::size_t i) {
        if (i == 17) throw DomainError("path 17 left the domain");
    };
    CHECK_THROWS_AS(mc::run_indexed(64, 2, boom), DomainError);
    CHECK_THROWS_AS(mc::run_indexed_serial(64, boom), DomainError);
}

TEST_CASE("worker resolution prefers the explicit request") {
    CHECK(mc::resolve_workers(3) == 3);
    CHECK(mc::resolve_workers(1) == 1);
    CHECK(mc::resolve_workers(0) >= 1);
}

TEST_CASE("worker resolution falls back to the environment") {
    EnvGuard guard("SDE_ERRLAB_WORKERS");
    setenv("SDE_ERRLAB_WORKERS", "2", 1);
    CHECK(mc::default_workers() == 2);
    CHECK(mc::resolve_workers(0) == 2);
    CHECK(mc::resolve_workers(5) == 5);  // explicit beats environment

    setenv("SDE_ERRLAB_WORKERS", "0", 1);
    CHECK_THROWS_AS(mc::default_workers(), ConfigError);
    setenv("SDE_ERRLAB_WORKERS", "abc", 1);
    CHECK_THROWS_AS(mc::default_workers(), ConfigError);
    setenv("SDE_ERRLAB_WORKERS", "-4", 1);
    CHECK_THROWS_AS(mc::default_workers(), ConfigError);

    unsetenv("SDE_ERRLAB_WORKERS");
    CHECK(mc::default_workers() >= 1);
}

TEST_CASE("zero iterations are a no-op") {
    bool touched = false;
    mc::run_indexed(0, 4, [&](std::size_t) { touched = true; });
    CHECK_FALSE(touched);
}
