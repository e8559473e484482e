#pragma once

#include <stdexcept>
#include <string>

namespace psplit {

/// Shapes or dimensions that do not line up.
class StructuralError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A parameter outside its admissible range.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An operation requested of an object that does not support it, or
/// a read outside a retention window.
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Raised when a runtime check shows the problem violates the method's
/// standing assumptions (e.g. a backtracking loop that does not terminate).
class AssumptionViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace psplit
