#pragma once

#include <stdexcept>
#include <string>

namespace levy {

// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the admissible domain (tilt outside the MGF domain, delta <= 0, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Iterative solver ran out of iterations.
class NoConvergence : public Error {
public:
    using Error::Error;
};

// Hessian of the cumulant is singular: the increment law lives on a hyperplane.
class DegenerateModel : public Error {
public:
    using Error::Error;
};

class NoFiniteMinimum : public Error {
public:
    using Error::Error;
};

class VertexNotMpp : public Error {
public:
    using Error::Error;
};

class NoRoot : public Error {
public:
    using Error::Error;
};

// Raised when an operation needs the asymptotic conditions and they do not hold.
class ConditionError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class FitError : public Error {
public:
    using Error::Error;
};

}  // namespace levy
