#pragma once

#include <stdexcept>
#include <string>

namespace hesn {

// Root of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ArgumentError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class SingularityError : public Error {
public:
    using Error::Error;
};

// Zero variance / zero range inputs where a ratio is undefined.
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

// Iterative routine gave up; best_estimate() holds the last usable value.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double best_estimate)
        : Error(what), best_estimate_(best_estimate) {}
    double best_estimate() const noexcept { return best_estimate_; }

private:
    double best_estimate_;
};

class BuildError : public Error {
public:
    using Error::Error;
};

class DataError : public Error {
public:
    using Error::Error;
};

class FileNotFoundError : public DataError {
public:
    using DataError::DataError;
};

class ParseError : public DataError {
public:
    using DataError::DataError;
};

class InsufficientDataError : public DataError {
public:
    using DataError::DataError;
};

} // namespace hesn
