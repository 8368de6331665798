#pragma once

#include <stdexcept>
#include <string>

namespace nlmsa {

// Bad input: dimensions, domains, spectrum gap rule, config values.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Result numerically untrustworthy: cancellation beyond the clamp policy,
// removable singularity hit, assembled moment significantly negative.
class ConditioningError : public std::runtime_error {
public:
    explicit ConditioningError(const std::string& what) : std::runtime_error(what) {}
};

// Steady-state quantity requested where rho(F) >= 1.
class InstabilityError : public std::runtime_error {
public:
    explicit InstabilityError(const std::string& what) : std::runtime_error(what) {}
};

// Simulator abort (e.g. exactly zero-norm regressor).
class SimulationError : public std::runtime_error {
public:
    explicit SimulationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace nlmsa
