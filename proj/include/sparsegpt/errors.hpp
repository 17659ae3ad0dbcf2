#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sparsegpt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dimension mismatch, out-of-bounds slice, asymmetric input.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Non-finite values or arguments outside their mathematical domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Invalid pruning / bench configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed FMAT1 / CSV input.
class FormatError : public Error {
public:
    using Error::Error;
};

class InsufficientDataError : public Error {
public:
    using Error::Error;
};

class DegenerateCalibrationError : public Error {
public:
    using Error::Error;
};

/// Factorization or elimination hit a non-positive (or exactly zero) pivot.
class SingularityError : public Error {
public:
    SingularityError(std::size_t pivot, const std::string& what)
        : Error(what + " (pivot " + std::to_string(pivot) + ")"), pivot_(pivot) {}

    std::size_t pivot() const noexcept { return pivot_; }

private:
    std::size_t pivot_;
};

/// An inverse-Hessian diagonal entry is too small to divide by.
class DegenerateDiagonalError : public Error {
public:
    DegenerateDiagonalError(std::size_t column, const std::string& what)
        : Error(what + " (column " + std::to_string(column) + ")"), column_(column) {}

    std::size_t column() const noexcept { return column_; }

private:
    std::size_t column_;
};

} // namespace sparsegpt
