#include "sparsegpt/matrix.hpp"

#include <algorithm>
#include <cmath>

namespace sparsegpt {

std::string_view phase_name(Phase phase) noexcept
{
    switch (phase) {
    case Phase::Hessian:
        return "hessian";
    case Phase::Mask:
        return "mask";
    case Phase::Error:
        return "error";
    case Phase::Inner:
        return "inner";
    case Phase::Outer:
        return "outer";
    case Phase::Finalize:
        return "finalize";
    }
    return "unknown";
}

Phase phase_from_name(std::string_view name)
{
    for (Phase p : kAllPhases) {
        if (phase_name(p) == name) {
            return p;
        }
    }
    throw ConfigError("unknown phase '" + std::string(name) + "'");
}

OpCounts FlopLedger::total() const noexcept
{
    OpCounts sum;
    for (const auto& c : counts_) {
        sum += c;
    }
    return sum;
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill)
{
    if (!std::isfinite(fill)) {
        throw DomainError("matrix fill value must be finite");
    }
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::span<const double> data)
    : rows_(rows), cols_(cols)
{
    if (data.size() != rows * cols) {
        throw ShapeError("data length " + std::to_string(data.size()) + " does not match " + std::to_string(rows) +
                         "x" + std::to_string(cols));
    }
    data_.assign(data.begin(), data.end());
    if (!all_finite()) {
        throw DomainError("matrix data contains NaN or Inf");
    }
}

DenseMatrix::DenseMatrix(ConstMatrixView view) : rows_(view.rows()), cols_(view.cols()), data_(rows_ * cols_)
{
    for (std::size_t r = 0; r < rows_; ++r) {
        auto src = view.row(r);
        std::copy(src.begin(), src.end(), data_.begin() + static_cast<std::ptrdiff_t>(r * cols_));
    }
}

DenseMatrix DenseMatrix::identity(std::size_t n)
{
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

DenseMatrix DenseMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows)
{
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    std::vector<double> flat;
    flat.reserve(r * c);
    for (const auto& row : rows) {
        if (row.size() != c) {
            throw ShapeError("ragged row list");
        }
        flat.insert(flat.end(), row.begin(), row.end());
    }
    return DenseMatrix(r, c, flat);
}

bool DenseMatrix::all_finite() const noexcept
{
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

DenseMatrix transposed(ConstMatrixView a)
{
    DenseMatrix t(a.cols(), a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t c = 0; c < a.cols(); ++c) {
            t(c, r) = a(r, c);
        }
    }
    return t;
}

double max_abs_diff(ConstMatrixView a, ConstMatrixView b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ShapeError("max_abs_diff: shape mismatch");
    }
    double worst = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t c = 0; c < a.cols(); ++c) {
            worst = std::max(worst, std::abs(a(r, c) - b(r, c)));
        }
    }
    return worst;
}

void require_finite(ConstMatrixView a, std::string_view what)
{
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (double v : a.row(r)) {
            if (!std::isfinite(v)) {
                throw DomainError(std::string(what) + " contains NaN or Inf");
            }
        }
    }
}

BinaryMask::BinaryMask(std::size_t rows, std::size_t cols, bool fill)
    : rows_(rows), cols_(cols), bits_(rows * cols, fill ? 1 : 0)
{
}

std::size_t BinaryMask::column_count(std::size_t c) const noexcept
{
    std::size_t n = 0;
    for (std::size_t r = 0; r < rows_; ++r) {
        n += bits_[r * cols_ + c];
    }
    return n;
}

std::size_t BinaryMask::count() const noexcept
{
    std::size_t n = 0;
    for (auto b : bits_) {
        n += b;
    }
    return n;
}

DenseMatrix BinaryMask::to_dense() const
{
    DenseMatrix m(rows_, cols_);
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        m.values()[i] = bits_[i] ? 1.0 : 0.0;
    }
    return m;
}

std::string MatMulBackend::name() const
{
    if (kind == Kind::Classical) {
        return "classical";
    }
    return "strassen";
}

MatMulBackend MatMulBackend::parse(std::string_view name)
{
    if (name == "classical") {
        return classical();
    }
    if (name == "strassen") {
        return strassen();
    }
    throw ConfigError("unknown backend '" + std::string(name) + "' (expected classical|strassen)");
}

} // namespace sparsegpt
