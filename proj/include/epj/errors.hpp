#pragma once

#include <stdexcept>
#include <string>

namespace epj {

/// Malformed or invalid configuration input. Messages name the offending key.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// A simulation that cannot complete: watchdog expiry, non-finite state,
/// or an infeasible energy budget.
struct SimulationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Operation called on a state whose latch mode forbids it.
struct StateError : std::logic_error {
    using std::logic_error::logic_error;
};

/// Root bracket without a sign change.
struct BracketError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace epj
