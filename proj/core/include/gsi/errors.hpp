#pragma once

#include <stdexcept>
#include <string>

namespace gsi {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the requested operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure failed to reach its tolerance.
class NumericalError : public Error {
public:
    using Error::Error;
};

} // namespace gsi
