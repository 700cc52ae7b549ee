#pragma once

#include <stdexcept>
#include <string>

namespace matchstat {

// Input or contract violation: malformed data, invalid arguments, undefined
// statistics. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A matrix that must be inverted is not (numerically) positive definite.
class SingularMatrixError : public Error {
public:
    using Error::Error;
};

}  // namespace matchstat
