#pragma once

#include <stdexcept>
#include <string>

namespace mechfront {

struct InvalidSettingError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Thrown when |profiles| * m would exceed the configured cap.
struct DomainTooLargeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A profile (e.g. a unilateral deviation) lies outside a restricted space.
struct NotInDomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SpaceMismatchError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// An internal consistency check failed (e.g. observed non-convexity of the
/// frontier, or an LP solution violating a constraint).
struct InternalConsistencyError : std::logic_error {
    using std::logic_error::logic_error;
};

}  // namespace mechfront
