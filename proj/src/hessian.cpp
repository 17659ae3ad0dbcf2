#include "sparsegpt/hessian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sparsegpt {

InverseHessian build_inverse_hessian(ConstMatrixView x, std::optional<double> lambda, OpCounts* counts,
                                     const MatMulBackend& gram_backend, ExecMode mode)
{
    const std::size_t d = x.rows();
    if (x.cols() == 0) {
        throw ShapeError("calibration matrix needs at least one column");
    }
    if (lambda && !(std::isfinite(*lambda) && *lambda > 0.0)) {
        throw DomainError("lambda must be finite and > 0");
    }
    require_finite(x, "calibration matrix");

    OpCounts ops;
    DenseMatrix gram = matmul(x, transposed(x), gram_backend, &ops, mode);

    double shift = 0.0;
    if (lambda) {
        shift = *lambda;
    } else {
        double trace = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            trace += gram(i, i);
        }
        ops.add += d == 0 ? 0 : d - 1;
        if (!(trace > 0.0)) {
            throw DegenerateCalibrationError("automatic lambda needs trace(X X^T) > 0");
        }
        shift = kAutoLambdaFraction * trace / static_cast<double>(d);
        ops.mul += 1;
        ops.div += 1;
    }
    for (std::size_t i = 0; i < d; ++i) {
        gram(i, i) += shift;
    }
    ops.add += d;

    InverseHessian out;
    out.h = spd_inverse(gram, &ops);
    out.lambda = shift;
    out.diag_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < d; ++i) {
        out.diag_min = std::min(out.diag_min, out.h(i, i));
    }
    if (d > 0 && !(out.diag_min > 0.0)) {
        throw SingularityError(0, "inverse Hessian has a non-positive diagonal");
    }
    if (counts != nullptr) {
        *counts += ops;
    }
    return out;
}

} // namespace sparsegpt
