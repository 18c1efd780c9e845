#pragma once

#include <stdexcept>
#include <string>

namespace jcdiss {

// Bad user input or a violated precondition. The CLI maps this to exit code 2.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Anything that goes wrong inside a computation. The CLI maps this to exit code 3.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IntegrationError : NumericalError {
    IntegrationError(const std::string& what, double t) : NumericalError(what), time(t) {}
    double time;
};

// The non-Hermitian block K^(n) has a single Jordan block (chi_n = -1).
struct ExceptionalPointError : NumericalError {
    using NumericalError::NumericalError;
};

} // namespace jcdiss
