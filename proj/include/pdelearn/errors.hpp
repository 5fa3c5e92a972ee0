#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pdelearn {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GridError : Error {
    using Error::Error;
};

struct InsufficientPointsError : Error {
    using Error::Error;
};

/// Explicit time step violates the scheme's stability bound.
struct StabilityError : Error {
    using Error::Error;
};

/// Non-finite state encountered during time stepping or training.
struct DivergenceError : Error {
    DivergenceError(const std::string& what, std::size_t step)
        : Error(what + " (step " + std::to_string(step) + ")"), step(step) {}
    std::size_t step;
};

/// Local regression window produced a rank-deficient fit.
struct SingularFitError : Error {
    SingularFitError(std::size_t i, std::size_t j)
        : Error("singular local fit at grid point (" + std::to_string(i) + ", " +
                std::to_string(j) + ")"),
          i(i), j(j) {}
    std::size_t i, j;
};

struct ConfigError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

/// A stage artifact no longer matches the upstream file it was built from.
struct StaleArtifactError : Error {
    using Error::Error;
};

}  // namespace pdelearn
