#ifndef NORMSOL_ERRORS_HPP
#define NORMSOL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace normsol {

// Invalid problem parameters (domain violations, named inequality in message).
struct parameter_error : std::invalid_argument {
    explicit parameter_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Quadrature / root-finding / optimizer breakdowns.
struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A solver was asked to run outside its admissible coupling range.
struct threshold_violation : std::runtime_error {
    explicit threshold_violation(const std::string& msg) : std::runtime_error(msg) {}
};

// A required precomputed quantity (thresholds, ground state) is missing.
struct dependency_error : std::logic_error {
    explicit dependency_error(const std::string& msg) : std::logic_error(msg) {}
};

// A degenerate input (zero function where a profile is required).
struct degenerate_input : std::invalid_argument {
    explicit degenerate_input(const std::string& msg) : std::invalid_argument(msg) {}
};

// Fewer converged data points than a regression needs.
struct insufficient_data : std::runtime_error {
    explicit insufficient_data(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace normsol

#endif
