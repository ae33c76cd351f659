#pragma once

#include <stdexcept>
#include <string>

namespace kcoll {

/// Invalid argument or configuration supplied by the caller.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A kernel family, derivative order or operator order that is not implemented.
class UnsupportedError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Numerical breakdown: singular systems, non-finite values, failed factorizations.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace kcoll
