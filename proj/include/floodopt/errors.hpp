#ifndef FLOODOPT_ERRORS_HPP
#define FLOODOPT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace floodopt {

/// Malformed or out-of-range input to a pure operation (bad index, bad value, length mismatch).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Configuration file is unreadable, malformed or inconsistent.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The flood evaluator (surrogate or external) failed to produce a depth grid.
/// Runs abort on this error; no penalty fitness is ever assigned.
class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An objective range collapsed to zero where a division by it is required.
class DegenerateRangeError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

} // namespace floodopt

#endif
