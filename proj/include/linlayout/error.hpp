#pragma once

#include <stdexcept>
#include <string>

namespace linlayout {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad hyperparameters, layer sizes, generator settings, empty pair sets.
class InvalidConfig : public Error {
public:
    using Error::Error;
};

/// Dimension or shape mismatch between operands.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Value outside the mathematical domain of an operation (BCE at 0/1,
/// unnormalized adjacency entries, NaN features, constant matrices).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Power iteration did not converge within its iteration budget.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Malformed CSV / edge-list / config input. `line()` is 1-based, 0 if unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class CheckpointError : public Error {
public:
    using Error::Error;
};

class CheckpointVersionError : public CheckpointError {
public:
    using CheckpointError::CheckpointError;
};

} // namespace linlayout
