#include "sparsegpt/matrix.hpp"

#include <algorithm>
#include <thread>

namespace sparsegpt {

namespace {

// Output element (i, j) accumulates a(i, 0) b(0, j), a(i, 1) b(1, j), ... in
// that order, independent of how rows are distributed.
void classical_rows(ConstMatrixView a, ConstMatrixView b, MatrixView c, std::size_t row_lo, std::size_t row_hi)
{
    const std::size_t inner = a.cols();
    const std::size_t n = b.cols();
    for (std::size_t i = row_lo; i < row_hi; ++i) {
        double* out = c.row(i).data();
        std::fill(out, out + n, 0.0);
        for (std::size_t k = 0; k < inner; ++k) {
            const double aik = a(i, k);
            const double* brow = b.row(k).data();
            for (std::size_t j = 0; j < n; ++j) {
                out[j] += aik * brow[j];
            }
        }
    }
}

void classical_into(ConstMatrixView a, ConstMatrixView b, MatrixView c, ExecMode mode)
{
    const std::size_t m = a.rows();
    const std::size_t work = m * a.cols() * b.cols();
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (mode == ExecMode::Deterministic || hw == 1 || m < 2 || work < (std::size_t{1} << 18)) {
        classical_rows(a, b, c, 0, m);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(hw, m);
    const std::size_t chunk = (m + workers - 1) / workers;
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t lo = 0; lo < m; lo += chunk) {
        const std::size_t hi = std::min(m, lo + chunk);
        pool.emplace_back([=] { classical_rows(a, b, c, lo, hi); });
    }
}

// Zero-padded copy of the (rows x cols) window of `src` starting at (r0, c0).
DenseMatrix padded_block(ConstMatrixView src, std::size_t r0, std::size_t c0, std::size_t rows, std::size_t cols)
{
    DenseMatrix out(rows, cols);
    const std::size_t r_end = std::min(src.rows(), r0 + rows);
    const std::size_t c_end = std::min(src.cols(), c0 + cols);
    for (std::size_t r = r0; r < r_end; ++r) {
        for (std::size_t c = c0; c < c_end; ++c) {
            out(r - r0, c - c0) = src(r, c);
        }
    }
    return out;
}

DenseMatrix combine(const DenseMatrix& x, const DenseMatrix& y, double sign, OpCounts& counts)
{
    DenseMatrix out(x.rows(), x.cols());
    auto xv = x.values();
    auto yv = y.values();
    auto ov = out.values();
    for (std::size_t i = 0; i < ov.size(); ++i) {
        ov[i] = sign > 0 ? xv[i] + yv[i] : xv[i] - yv[i];
    }
    counts.add += ov.size();
    return out;
}

void accumulate(DenseMatrix& acc, const DenseMatrix& y, double sign, OpCounts& counts)
{
    auto av = acc.values();
    auto yv = y.values();
    for (std::size_t i = 0; i < av.size(); ++i) {
        av[i] = sign > 0 ? av[i] + yv[i] : av[i] - yv[i];
    }
    counts.add += av.size();
}

DenseMatrix strassen_rec(ConstMatrixView a, ConstMatrixView b, std::size_t threshold, OpCounts& counts)
{
    const std::size_t m = a.rows();
    const std::size_t k = a.cols();
    const std::size_t n = b.cols();
    if (m <= threshold || k <= threshold || n <= threshold) {
        DenseMatrix c(m, n);
        classical_rows(a, b, c.view(), 0, m);
        counts += classical_op_counts(m, k, n);
        return c;
    }
    const std::size_t mh = (m + 1) / 2;
    const std::size_t kh = (k + 1) / 2;
    const std::size_t nh = (n + 1) / 2;

    const DenseMatrix a11 = padded_block(a, 0, 0, mh, kh);
    const DenseMatrix a12 = padded_block(a, 0, kh, mh, kh);
    const DenseMatrix a21 = padded_block(a, mh, 0, mh, kh);
    const DenseMatrix a22 = padded_block(a, mh, kh, mh, kh);
    const DenseMatrix b11 = padded_block(b, 0, 0, kh, nh);
    const DenseMatrix b12 = padded_block(b, 0, nh, kh, nh);
    const DenseMatrix b21 = padded_block(b, kh, 0, kh, nh);
    const DenseMatrix b22 = padded_block(b, kh, nh, kh, nh);

    DenseMatrix m1 = strassen_rec(combine(a11, a22, +1, counts), combine(b11, b22, +1, counts), threshold, counts);
    DenseMatrix m2 = strassen_rec(combine(a21, a22, +1, counts), b11, threshold, counts);
    DenseMatrix m3 = strassen_rec(a11, combine(b12, b22, -1, counts), threshold, counts);
    DenseMatrix m4 = strassen_rec(a22, combine(b21, b11, -1, counts), threshold, counts);
    DenseMatrix m5 = strassen_rec(combine(a11, a12, +1, counts), b22, threshold, counts);
    DenseMatrix m6 = strassen_rec(combine(a21, a11, -1, counts), combine(b11, b12, +1, counts), threshold, counts);
    DenseMatrix m7 = strassen_rec(combine(a12, a22, -1, counts), combine(b21, b22, +1, counts), threshold, counts);

    // c11 = m1 + m4 - m5 + m7, c12 = m3 + m5, c21 = m2 + m4, c22 = m1 - m2 + m3 + m6
    DenseMatrix c11 = combine(m1, m4, +1, counts);
    accumulate(c11, m5, -1, counts);
    accumulate(c11, m7, +1, counts);
    DenseMatrix c12 = combine(m3, m5, +1, counts);
    DenseMatrix c21 = combine(m2, m4, +1, counts);
    DenseMatrix c22 = combine(m1, m2, -1, counts);
    accumulate(c22, m3, +1, counts);
    accumulate(c22, m6, +1, counts);

    DenseMatrix c(m, n);
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t col = 0; col < n; ++col) {
            const bool top = r < mh;
            const bool left = col < nh;
            const std::size_t rr = top ? r : r - mh;
            const std::size_t cc = left ? col : col - nh;
            const DenseMatrix& q = top ? (left ? c11 : c12) : (left ? c21 : c22);
            c(r, col) = q(rr, cc);
        }
    }
    return c;
}

} // namespace

OpCounts classical_op_counts(std::size_t m, std::size_t k, std::size_t n) noexcept
{
    OpCounts c;
    c.mul = static_cast<std::uint64_t>(m) * k * n;
    c.add = k == 0 ? 0 : static_cast<std::uint64_t>(m) * (k - 1) * n;
    return c;
}

OpCounts strassen_op_counts(std::size_t m, std::size_t k, std::size_t n, std::size_t threshold) noexcept
{
    if (m <= threshold || k <= threshold || n <= threshold) {
        return classical_op_counts(m, k, n);
    }
    const std::size_t mh = (m + 1) / 2;
    const std::size_t kh = (k + 1) / 2;
    const std::size_t nh = (n + 1) / 2;
    OpCounts sub = strassen_op_counts(mh, kh, nh, threshold);
    OpCounts total;
    total.mul = 7 * sub.mul;
    total.add = 7 * sub.add + 5 * static_cast<std::uint64_t>(mh) * kh + 5 * static_cast<std::uint64_t>(kh) * nh +
                8 * static_cast<std::uint64_t>(mh) * nh;
    return total;
}

OpCounts predicted_matmul_counts(std::size_t m, std::size_t k, std::size_t n, const MatMulBackend& backend) noexcept
{
    if (backend.kind == MatMulBackend::Kind::Strassen) {
        return strassen_op_counts(m, k, n, backend.threshold);
    }
    return classical_op_counts(m, k, n);
}

DenseMatrix matmul(ConstMatrixView a, ConstMatrixView b, const MatMulBackend& backend, OpCounts* counts,
                   ExecMode mode)
{
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " times " +
                         std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    }
    OpCounts local;
    DenseMatrix c;
    if (backend.kind == MatMulBackend::Kind::Strassen) {
        c = strassen_rec(a, b, backend.threshold, local);
    } else {
        c = DenseMatrix(a.rows(), b.cols());
        classical_into(a, b, c.view(), mode);
        local = classical_op_counts(a.rows(), a.cols(), b.cols());
    }
    require_finite(c, "matmul result");
    if (counts != nullptr) {
        *counts += local;
    }
    return c;
}

} // namespace sparsegpt
