#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sdelab {

// Invalid configuration (parameter guard, malformed scheme, bad file). CLI maps
// this to exit code 1; messages name the violated condition.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// An evaluator produced a non-finite value inside its declared domain.
class domain_violation : public std::runtime_error {
public:
    domain_violation(const std::string& what, std::vector<double> x)
        : std::runtime_error(what), offending_x(std::move(x)) {}

    std::vector<double> offending_x;
};

// Not enough usable data for a fit (e.g. fewer than 4 points).
class estimation_error : public std::runtime_error {
public:
    explicit estimation_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace sdelab
