#pragma once

#include "sparsegpt/hessian.hpp"
#include "sparsegpt/matrix.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace sparsegpt {

/// Squared weights over the squared inverse-Hessian diagonal; all entries >= 0.
using SaliencyVector = std::vector<double>;

/// A d x r block of the mask. Every column holds exactly keep_count ones.
struct MaskBlock {
    BinaryMask entries;
    std::size_t keep_count = 0;
};

/// Diagonal entries with |h| below this are rejected.
inline constexpr double kMinDiagonal = 1e-300;

/// Number of weights kept per column: d - floor(p * d).
std::size_t keep_count(double sparsity, std::size_t d);

/// w_i = column_i^2 / h_diag^2. `column_index` only labels the error.
SaliencyVector saliency(std::span<const double> column, double h_diag, OpCounts* counts = nullptr,
                        std::size_t column_index = 0);

/// Indices of the k largest entries, largest first; equal values rank the
/// smaller index first. Comparisons are charged to counts->compare.
std::vector<std::size_t> top_k_indices(std::span<const double> w, std::size_t k, OpCounts* counts = nullptr);

/// Mask for the columns [s, s + r) of W given as `block` (d x r).
MaskBlock mask_select(double sparsity, ConstMatrixView block, const InverseHessian& hinv, std::size_t s,
                      OpCounts* counts = nullptr);

} // namespace sparsegpt
