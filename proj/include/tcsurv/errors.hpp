#pragma once

#include <stdexcept>
#include <string>

namespace tcsurv {

/// Malformed or inconsistent input data (files, records, configs).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A function was called outside its documented domain.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// NaN or Inf appeared in a loss or gradient.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, std::string sequence_id)
        : std::runtime_error(what), sequence_id_(std::move(sequence_id)) {}

    const std::string& sequence_id() const noexcept { return sequence_id_; }

private:
    std::string sequence_id_;
};

/// Intercept bisection could not reach the requested censoring fraction.
class CalibrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace tcsurv
