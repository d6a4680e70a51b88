#pragma once

#include <stdexcept>
#include <string>

namespace l2t {

// Bad input data: unreadable files, dimension mismatches, malformed warps.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The estimator met a non-finite cost or gradient.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Arguments outside an operation's domain (h <= 0, empty input, bad gammas).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace l2t
