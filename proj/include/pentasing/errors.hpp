#ifndef PENTASING_ERRORS_HPP
#define PENTASING_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pentasing {

// Architecture or specialization collapses (zero minors, wrong gcd degree,
// identically vanishing quadric/cone, metric not positive definite).
struct degenerate_error : std::runtime_error {
    explicit degenerate_error(const std::string& m) : std::runtime_error(m) {}
};

// Inputs on one of the parametrization's uncovered sub-varieties.
struct exclusion_error : std::runtime_error {
    explicit exclusion_error(const std::string& m) : std::runtime_error(m) {}
};

struct solver_error : std::runtime_error {
    explicit solver_error(const std::string& m) : std::runtime_error(m) {}
};

struct config_error : std::runtime_error {
    explicit config_error(const std::string& m) : std::runtime_error(m) {}
};

}  // namespace pentasing

#endif
