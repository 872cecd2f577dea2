#ifndef AGEKIT_ERRORS_HPP
#define AGEKIT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace agekit {

// Linear system is singular or the chain it came from is reducible/degenerate.
struct SingularSystem : std::runtime_error {
    explicit SingularSystem(const std::string& what) : std::runtime_error(what) {}
};

// An input that must be consistent with another input is not (e.g. a stationary
// vector that does not solve its generator).
struct InconsistentInput : std::runtime_error {
    explicit InconsistentInput(const std::string& what) : std::runtime_error(what) {}
};

// Bad user-facing configuration (CLI flags, config files, sim parameters).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Unknown figure id passed to the reproduce pipeline.
struct UnknownFigure : std::runtime_error {
    explicit UnknownFigure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace agekit

#endif
