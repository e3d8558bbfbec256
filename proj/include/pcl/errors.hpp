#pragma once

#include <stdexcept>
#include <string>

namespace pcl {

// Base for every error the library throws. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A request exceeds a configured size cap (sieve limit, character modulus, ...).
class CapacityError : public Error {
public:
    using Error::Error;
};

// An argument lies outside the data that has been prepared (e.g. x beyond the sieve).
class RangeError : public Error {
public:
    using Error::Error;
};

// An argument violates a mathematical precondition.
class DomainError : public Error {
public:
    using Error::Error;
};

// Two routes that must agree did not.
class NumericalConsistencyError : public Error {
public:
    using Error::Error;
};

class ConstructionError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace pcl
