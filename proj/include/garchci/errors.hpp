#pragma once

#include <stdexcept>
#include <string>

namespace garchci {

// Base for all recoverable library failures. Invalid construction
// parameters raise std::invalid_argument instead.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NonStationary : public Error {
public:
    using Error::Error;
};

// rho^2 >= 1: fourth moment of the stationary law is infinite.
class MomentCondition : public Error {
public:
    using Error::Error;
};

class InsufficientLength : public Error {
public:
    using Error::Error;
};

class AttemptsExhausted : public Error {
public:
    using Error::Error;
};

class LengthMismatch : public Error {
public:
    using Error::Error;
};

class Degenerate : public Error {
public:
    using Error::Error;
};

}  // namespace garchci
