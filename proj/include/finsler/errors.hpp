// Error types shared across the library.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace finsler {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Syntax / arity problems while parsing an expression or a patch file.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t offset)
        : Error(msg + " (offset " + std::to_string(offset) + ")"), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

// Evaluation left the domain of a function (log of nonpositive, division by
// zero, ...). Carries the byte offset of the offending node in the source.
class EvalDomainError : public Error {
public:
    EvalDomainError(const std::string& msg, std::size_t node_offset)
        : Error(msg + " (at expression offset " + std::to_string(node_offset) + ")"),
          offset_(node_offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

// The quadratic form a(x) or the fundamental tensor failed to be positive
// definite where the computation requires it.
class ConvexityError : public Error {
public:
    using Error::Error;
};

// Metric value came out nonpositive.
class MetricPositivityError : public Error {
public:
    using Error::Error;
};

// y = 0 passed to a metric quantity.
class InvalidDirectionError : public Error {
public:
    using Error::Error;
};

// Operation requires a closed 1-form b and the patch is not closed.
class NotClosedError : public Error {
public:
    using Error::Error;
};

// A solver failed to converge where the caller demanded convergence.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

}  // namespace finsler
