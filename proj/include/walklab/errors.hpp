#pragma once

#include <stdexcept>

namespace walklab {

/// An exact path identity failed; always an internal bug, never statistics.
struct IdentityViolation : std::logic_error {
    using std::logic_error::logic_error;
};

/// Successive quadrature refinements disagree beyond the requested tolerance.
struct NonConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace walklab
