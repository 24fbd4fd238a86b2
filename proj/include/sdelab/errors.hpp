#pragma once

#include <stdexcept>
#include <string>

namespace sdelab {

// Bad experiment setup: unknown model, malformed n_list, invalid parameter
// values and the like.  The command line tool maps this to exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A simulation left the region where the requested computation makes sense,
// e.g. a plain Euler step drove a square-root diffusion negative.  Maps to
// exit code 3.
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

}
