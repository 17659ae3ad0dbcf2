#include "sparsegpt/matrix.hpp"

#include <algorithm>
#include <cmath>

namespace sparsegpt {

namespace {

constexpr double kSymmetryTolerance = 1e-12;
constexpr double kMinPivot = 1e-300;

void require_symmetric(ConstMatrixView a)
{
    if (a.rows() != a.cols()) {
        throw ShapeError("spd_inverse: matrix is " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                         ", expected square");
    }
    double scale = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (double v : a.row(r)) {
            scale = std::max(scale, std::abs(v));
        }
    }
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t c = r + 1; c < a.cols(); ++c) {
            if (std::abs(a(r, c) - a(c, r)) > kSymmetryTolerance * scale) {
                throw ShapeError("spd_inverse: matrix is not symmetric at (" + std::to_string(r) + "," +
                                 std::to_string(c) + ")");
            }
        }
    }
}

} // namespace

DenseMatrix spd_inverse(ConstMatrixView a, OpCounts* counts)
{
    require_symmetric(a);
    require_finite(a, "spd_inverse input");
    const std::size_t n = a.rows();
    OpCounts ops;

    // A = L D L^T with unit lower L. Row i of `unit` holds L(i, 0..i-1); `scaled`
    // holds L(i, k) D(k) for the row being factored.
    DenseMatrix unit = DenseMatrix::identity(n);
    DenseMatrix diag(1, n);
    DenseMatrix scaled(1, n);
    double* w = scaled.view().row(0).data();
    for (std::size_t i = 0; i < n; ++i) {
        double* li = unit.view().row(i).data();
        for (std::size_t j = 0; j < i; ++j) {
            const double* lj = unit.view().row(j).data();
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) {
                s -= w[k] * lj[k];
            }
            w[j] = s;
            li[j] = s / diag(0, j);
            ops.mul += j;
            ops.add += j;
            ops.div += 1;
        }
        double s = a(i, i);
        for (std::size_t k = 0; k < i; ++k) {
            s -= w[k] * li[k];
        }
        ops.mul += i;
        ops.add += i;
        if (!(s > 0.0) || s < kMinPivot) {
            throw SingularityError(i, "spd_inverse: matrix is not positive definite");
        }
        diag(0, i) = s;
    }

    DenseMatrix inv_diag(1, n);
    for (std::size_t k = 0; k < n; ++k) {
        inv_diag(0, k) = 1.0 / diag(0, k);
    }
    ops.div += n;

    // Rows of `inv_t` are the columns of L^{-1}: forward substitution against e_j.
    DenseMatrix inv_t(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double* x = inv_t.view().row(j).data();
        x[j] = 1.0;
        for (std::size_t i = j + 1; i < n; ++i) {
            const double* li = unit.view().row(i).data();
            double s = 0.0;
            for (std::size_t k = j; k < i; ++k) {
                s += li[k] * x[k];
            }
            x[i] = -s;
            ops.mul += i - j;
            ops.add += i - j - 1;
        }
    }

    // A^{-1} = L^{-T} D^{-1} L^{-1}; (A^{-1})(i, j) = sum_{k >= max(i, j)} Linv(k, i) Linv(k, j) / D(k).
    const double* dinv = inv_diag.view().row(0).data();
    DenseMatrix inv(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* ui = inv_t.view().row(i).data();
        for (std::size_t j = 0; j <= i; ++j) {
            const double* uj = inv_t.view().row(j).data();
            double s = 0.0;
            for (std::size_t k = i; k < n; ++k) {
                s += ui[k] * dinv[k] * uj[k];
            }
            ops.mul += 2 * (n - i);
            ops.add += n - i - 1;
            inv(i, j) = s;
            inv(j, i) = s;
        }
    }

    require_finite(inv, "spd_inverse result");
    if (counts != nullptr) {
        *counts += ops;
    }
    return inv;
}

} // namespace sparsegpt
