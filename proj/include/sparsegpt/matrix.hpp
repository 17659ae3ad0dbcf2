#pragma once

#include "sparsegpt/errors.hpp"
#include "sparsegpt/memory.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace sparsegpt {

/// Half-open, 0-based index range [lo, hi).
struct Range {
    std::size_t lo = 0;
    std::size_t hi = 0;

    constexpr std::size_t size() const noexcept { return hi > lo ? hi - lo : 0; }
    constexpr bool empty() const noexcept { return hi <= lo; }
};

// ---------------------------------------------------------------------------
// Flop accounting
// ---------------------------------------------------------------------------

/// Named cost phases of one pruning run.
enum class Phase : std::uint8_t { Hessian, Mask, Error, Inner, Outer, Finalize };

inline constexpr std::array<Phase, 6> kAllPhases = {Phase::Hessian, Phase::Mask, Phase::Error,
                                                    Phase::Inner,   Phase::Outer, Phase::Finalize};

std::string_view phase_name(Phase phase) noexcept;
/// Throws ConfigError for unknown names.
Phase phase_from_name(std::string_view name);

/// Scalar operation counters. Square roots are counted as divisions.
struct OpCounts {
    std::uint64_t mul = 0;
    std::uint64_t add = 0;
    std::uint64_t div = 0;
    std::uint64_t compare = 0;

    OpCounts& operator+=(const OpCounts& other) noexcept
    {
        mul += other.mul;
        add += other.add;
        div += other.div;
        compare += other.compare;
        return *this;
    }

    std::uint64_t arithmetic() const noexcept { return mul + add + div; }

    friend bool operator==(const OpCounts&, const OpCounts&) = default;
};

class FlopLedger {
public:
    OpCounts& operator[](Phase phase) noexcept { return counts_[static_cast<std::size_t>(phase)]; }
    const OpCounts& operator[](Phase phase) const noexcept { return counts_[static_cast<std::size_t>(phase)]; }

    OpCounts total() const noexcept;
    void reset() noexcept { counts_ = {}; }

    friend bool operator==(const FlopLedger&, const FlopLedger&) = default;

private:
    std::array<OpCounts, kAllPhases.size()> counts_{};
};

// ---------------------------------------------------------------------------
// Views
// ---------------------------------------------------------------------------

/// Strided row-major window into matrix storage. Never owns memory.
template <class T>
class BasicMatrixView {
public:
    BasicMatrixView() = default;
    BasicMatrixView(T* data, std::size_t rows, std::size_t cols, std::size_t stride) noexcept
        : data_(data), rows_(rows), cols_(cols), stride_(stride)
    {
    }

    // mutable -> const view
    template <class U>
        requires(std::is_const_v<T> && std::is_same_v<std::remove_const_t<T>, U>)
    BasicMatrixView(const BasicMatrixView<U>& other) noexcept
        : data_(other.data()), rows_(other.rows()), cols_(other.cols()), stride_(other.stride())
    {
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t stride() const noexcept { return stride_; }
    bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }
    T* data() const noexcept { return data_; }

    T& operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * stride_ + c]; }

    std::span<T> row(std::size_t r) const noexcept { return {data_ + r * stride_, cols_}; }

    BasicMatrixView view(Range rows, Range cols) const
    {
        if (rows.lo > rows.hi || cols.lo > cols.hi || rows.hi > rows_ || cols.hi > cols_) {
            throw ShapeError("slice [" + std::to_string(rows.lo) + "," + std::to_string(rows.hi) + ")x[" +
                             std::to_string(cols.lo) + "," + std::to_string(cols.hi) + ") out of bounds for " +
                             std::to_string(rows_) + "x" + std::to_string(cols_) + " matrix");
        }
        T* origin = (rows.empty() || cols.empty()) ? data_ : data_ + rows.lo * stride_ + cols.lo;
        return BasicMatrixView(origin, rows.size(), cols.size(), stride_);
    }

private:
    T* data_ = nullptr;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t stride_ = 0;
};

using MatrixView = BasicMatrixView<double>;
using ConstMatrixView = BasicMatrixView<const double>;

// ---------------------------------------------------------------------------
// DenseMatrix
// ---------------------------------------------------------------------------

/// Row-major real matrix. Entries are finite after every library operation.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    /// Throws ShapeError on length mismatch, DomainError on non-finite data.
    DenseMatrix(std::size_t rows, std::size_t cols, std::span<const double> data);
    explicit DenseMatrix(ConstMatrixView view);

    static DenseMatrix identity(std::size_t n);
    static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }

    MatrixView view() noexcept { return {data_.data(), rows_, cols_, cols_}; }
    ConstMatrixView view() const noexcept { return {data_.data(), rows_, cols_, cols_}; }
    MatrixView view(Range rows, Range cols) { return view().view(rows, cols); }
    ConstMatrixView view(Range rows, Range cols) const { return view().view(rows, cols); }

    operator ConstMatrixView() const noexcept { return view(); }

    bool all_finite() const noexcept;

    friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) noexcept
    {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    memory::tracked_vector<double> data_;
};

DenseMatrix transposed(ConstMatrixView a);

/// max |a_ij - b_ij|; ShapeError on mismatch.
double max_abs_diff(ConstMatrixView a, ConstMatrixView b);

/// Throws DomainError naming `what` if any entry is NaN/Inf.
void require_finite(ConstMatrixView a, std::string_view what);

// ---------------------------------------------------------------------------
// Binary mask
// ---------------------------------------------------------------------------

/// Row-major 0/1 matrix.
class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(std::size_t rows, std::size_t cols, bool fill);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    bool operator()(std::size_t r, std::size_t c) const noexcept { return bits_[r * cols_ + c] != 0; }
    void set(std::size_t r, std::size_t c, bool v) noexcept { bits_[r * cols_ + c] = v ? 1 : 0; }

    std::size_t column_count(std::size_t c) const noexcept;
    std::size_t count() const noexcept;

    DenseMatrix to_dense() const;

    friend bool operator==(const BinaryMask& a, const BinaryMask& b) noexcept
    {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.bits_ == b.bits_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    memory::tracked_vector<std::uint8_t> bits_;
};

// ---------------------------------------------------------------------------
// Multiplication
// ---------------------------------------------------------------------------

struct MatMulBackend {
    enum class Kind : std::uint8_t { Classical, Strassen };

    static constexpr std::size_t kDefaultStrassenThreshold = 32;

    Kind kind = Kind::Classical;
    /// Strassen recursion falls back to Classical once any dimension is <= threshold.
    std::size_t threshold = kDefaultStrassenThreshold;

    static MatMulBackend classical() noexcept { return {Kind::Classical, 0}; }
    static MatMulBackend strassen(std::size_t threshold = kDefaultStrassenThreshold)
    {
        if (threshold == 0) {
            throw ConfigError("strassen threshold must be >= 1");
        }
        return {Kind::Strassen, threshold};
    }

    std::string name() const;
    /// "classical" or "strassen" (default threshold); ConfigError otherwise.
    static MatMulBackend parse(std::string_view name);

    friend bool operator==(const MatMulBackend&, const MatMulBackend&) = default;
};

/// Deterministic forbids internal threads. Performance may split classical
/// products across threads by output rows; results stay bitwise identical.
enum class ExecMode : std::uint8_t { Deterministic, Performance };

/// A * B. `counts`, when given, is incremented by the scalar ops actually performed.
DenseMatrix matmul(ConstMatrixView a, ConstMatrixView b, const MatMulBackend& backend = MatMulBackend::classical(),
                   OpCounts* counts = nullptr, ExecMode mode = ExecMode::Deterministic);

/// Op counts of the classical triple loop: m*k*n muls, m*(k-1)*n adds.
OpCounts classical_op_counts(std::size_t m, std::size_t k, std::size_t n) noexcept;

/// Op counts of the padded Strassen recursion on an (m x k) * (k x n) product.
OpCounts strassen_op_counts(std::size_t m, std::size_t k, std::size_t n, std::size_t threshold) noexcept;

OpCounts predicted_matmul_counts(std::size_t m, std::size_t k, std::size_t n, const MatMulBackend& backend) noexcept;

/// Inverse of a symmetric positive definite matrix via an LDL^T factorization. The result is
/// exactly symmetric. Ops land in `counts`.
DenseMatrix spd_inverse(ConstMatrixView a, OpCounts* counts = nullptr);

// ---------------------------------------------------------------------------
// I/O
// ---------------------------------------------------------------------------

/// FMAT1: magic "FMAT\x01\0\0\0", u64 rows, u64 cols, rows*cols f64, all little-endian, row-major.
void write_fmat(std::ostream& out, ConstMatrixView m);
DenseMatrix read_fmat(std::istream& in);
void write_fmat(const std::string& path, ConstMatrixView m);
DenseMatrix read_fmat(const std::string& path);

/// Comma-separated decimal, one row per line, shortest round-trip formatting.
void write_csv(std::ostream& out, ConstMatrixView m);
DenseMatrix read_csv(std::istream& in);
void write_csv(const std::string& path, ConstMatrixView m);
DenseMatrix read_csv(const std::string& path);

/// Dispatches on extension: ".csv" is CSV, anything else FMAT1.
DenseMatrix read_matrix(const std::string& path);
void write_matrix(const std::string& path, ConstMatrixView m);

} // namespace sparsegpt
