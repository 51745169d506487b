#pragma once

#include <stdexcept>
#include <string>

namespace qzeno {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand dimensions disagree (matrix sizes, factor layout).
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A value violates its type invariant (non-Hermitian, negative eigenvalue, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// An operation precondition does not hold for otherwise-valid inputs.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Requested size exceeds a hard capacity limit.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// Weight operator with non-positive trace used where a state is required.
class InvalidStateError : public Error {
public:
    using Error::Error;
};

/// A branch whose weight underflowed was selected.
class DegenerateBranchError : public Error {
public:
    using Error::Error;
};

class DegenerateFitError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Scenario configuration rejected; `field()` names the offending entry.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

} // namespace qzeno
