#include "sparsegpt/rational.hpp"

#include <utility>

namespace sparsegpt {

RationalMatrix::RationalMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, mpq_class(0))
{
}

RationalMatrix RationalMatrix::identity(std::size_t n)
{
    RationalMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1;
    }
    return m;
}

RationalMatrix RationalMatrix::from_rows(std::initializer_list<std::initializer_list<long>> rows)
{
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    RationalMatrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != c) {
            throw ShapeError("ragged row list");
        }
        std::size_t j = 0;
        for (long v : row) {
            m(i, j++) = v;
        }
        ++i;
    }
    return m;
}

RationalMatrix RationalMatrix::from_dense(ConstMatrixView m)
{
    RationalMatrix out(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            out(r, c) = mpq_class(m(r, c));
        }
    }
    return out;
}

DenseMatrix RationalMatrix::to_dense() const
{
    DenseMatrix out(rows_, cols_);
    for (std::size_t i = 0; i < data_.size(); ++i) {
        out.values()[i] = data_[i].get_d();
    }
    return out;
}

RationalMatrix RationalMatrix::transposed() const
{
    RationalMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) {
            t(c, r) = (*this)(r, c);
        }
    }
    return t;
}

RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b)
{
    if (a.cols_ != b.rows_) {
        throw ShapeError("rational matmul: inner dimensions differ");
    }
    RationalMatrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
        for (std::size_t k = 0; k < a.cols_; ++k) {
            const mpq_class& aik = a(i, k);
            if (aik == 0) {
                continue;
            }
            for (std::size_t j = 0; j < b.cols_; ++j) {
                c(i, j) += aik * b(k, j);
            }
        }
    }
    return c;
}

bool operator==(const RationalMatrix& a, const RationalMatrix& b)
{
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
}

RationalMatrix rational_inverse(const RationalMatrix& a)
{
    if (a.rows() != a.cols()) {
        throw ShapeError("rational_inverse: matrix is not square");
    }
    const std::size_t n = a.rows();
    RationalMatrix work = a;
    RationalMatrix inv = RationalMatrix::identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (abs(work(r, col)) > abs(work(pivot, col))) {
                pivot = r;
            }
        }
        if (work(pivot, col) == 0) {
            throw SingularityError(col, "rational_inverse: matrix is singular");
        }
        if (pivot != col) {
            for (std::size_t c = 0; c < n; ++c) {
                std::swap(work(pivot, c), work(col, c));
                std::swap(inv(pivot, c), inv(col, c));
            }
        }
        const mpq_class scale = 1 / work(col, col);
        for (std::size_t c = 0; c < n; ++c) {
            work(col, c) *= scale;
            inv(col, c) *= scale;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || work(r, col) == 0) {
                continue;
            }
            const mpq_class factor = work(r, col);
            for (std::size_t c = 0; c < n; ++c) {
                work(r, c) -= factor * work(col, c);
                inv(r, c) -= factor * inv(col, c);
            }
        }
    }
    return inv;
}

double max_abs_error(const RationalMatrix& exact, ConstMatrixView approx)
{
    if (exact.rows() != approx.rows() || exact.cols() != approx.cols()) {
        throw ShapeError("max_abs_error: shape mismatch");
    }
    mpq_class worst = 0;
    for (std::size_t r = 0; r < exact.rows(); ++r) {
        for (std::size_t c = 0; c < exact.cols(); ++c) {
            mpq_class diff = abs(exact(r, c) - mpq_class(approx(r, c)));
            if (diff > worst) {
                worst = diff;
            }
        }
    }
    return worst.get_d();
}

} // namespace sparsegpt
