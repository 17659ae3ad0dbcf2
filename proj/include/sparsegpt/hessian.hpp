#pragma once

#include "sparsegpt/matrix.hpp"

#include <optional>

namespace sparsegpt {

/// H = (X X^T + lambda I)^{-1}, symmetric with a strictly positive diagonal.
struct InverseHessian {
    DenseMatrix h;
    double lambda = 0.0;
    /// smallest diagonal entry of h
    double diag_min = 0.0;

    std::size_t dim() const noexcept { return h.rows(); }
    double diag(std::size_t i) const noexcept { return h(i, i); }
};

/// Fraction of the mean Gram diagonal used when lambda is not given.
inline constexpr double kAutoLambdaFraction = 0.01;

/// Builds the regularized inverse Hessian from calibration inputs X (d x N).
/// `lambda == nullopt` selects 0.01 * mean(diag(X X^T)).
/// The Gram product uses `gram_backend` (classical unless asked otherwise);
/// every scalar op is charged to `counts`.
InverseHessian build_inverse_hessian(ConstMatrixView x, std::optional<double> lambda, OpCounts* counts = nullptr,
                                     const MatMulBackend& gram_backend = MatMulBackend::classical(),
                                     ExecMode mode = ExecMode::Deterministic);

} // namespace sparsegpt
