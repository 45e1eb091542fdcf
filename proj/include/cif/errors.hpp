#pragma once

#include <stdexcept>
#include <string>

namespace cif {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numeric argument is outside its admissible range.
class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// A function is unusable: non-finite samples, zero norm where one is required.
class InvalidFunction : public Error {
public:
    using Error::Error;
};

/// Operator assembly produced a matrix that violates its structural contract.
class BuildFailure : public Error {
public:
    using Error::Error;
};

/// A caller handed an operator to a routine whose precondition it fails.
class ContractViolation : public Error {
public:
    using Error::Error;
};

class UnsupportedDimension : public Error {
public:
    using Error::Error;
};

} // namespace cif
