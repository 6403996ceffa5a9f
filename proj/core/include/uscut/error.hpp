#pragma once

#include <stdexcept>
#include <string>

namespace uscut {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller supplied a value that violates a documented precondition.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// File could not be read, parsed, or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// No finite s-t cut exists (every separating cut crosses an infinite edge).
class InfeasibleCut : public Error {
public:
    using Error::Error;
};

/// An internal invariant was broken; indicates a bug rather than bad input.
class InvariantViolation : public Error {
public:
    using Error::Error;
};

} // namespace uscut
