#pragma once

#include "sparsegpt/matrix.hpp"

#include <gmpxx.h>

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace sparsegpt {

/// Exact rational matrix (GMP rationals, always canonical). Used as the
/// ground-truth oracle for small problems.
class RationalMatrix {
public:
    RationalMatrix() = default;
    RationalMatrix(std::size_t rows, std::size_t cols);

    static RationalMatrix identity(std::size_t n);
    static RationalMatrix from_rows(std::initializer_list<std::initializer_list<long>> rows);
    /// Exact conversion: every binary64 value is a dyadic rational.
    static RationalMatrix from_dense(ConstMatrixView m);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    mpq_class& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    const mpq_class& operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    /// Each entry truncated toward zero to a double (mpq_get_d).
    DenseMatrix to_dense() const;

    RationalMatrix transposed() const;

    friend RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b);
    friend bool operator==(const RationalMatrix& a, const RationalMatrix& b);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<mpq_class> data_;
};

/// Exact Gauss-Jordan inverse with partial pivoting on absolute value.
/// Throws SingularityError when the matrix is exactly singular.
RationalMatrix rational_inverse(const RationalMatrix& a);

/// max |exact - approx| evaluated exactly, then rounded to double.
double max_abs_error(const RationalMatrix& exact, ConstMatrixView approx);

} // namespace sparsegpt
