#include "sparsegpt/mask.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sparsegpt {

std::size_t keep_count(double sparsity, std::size_t d)
{
    if (!(sparsity >= 0.0 && sparsity <= 1.0)) {
        throw ConfigError("sparsity must lie in [0, 1]");
    }
    const auto pruned = static_cast<std::size_t>(std::floor(sparsity * static_cast<double>(d)));
    return d - std::min(pruned, d);
}

SaliencyVector saliency(std::span<const double> column, double h_diag, OpCounts* counts, std::size_t column_index)
{
    if (!(std::abs(h_diag) >= kMinDiagonal)) {
        throw DegenerateDiagonalError(column_index, "inverse-Hessian diagonal too small for saliency");
    }
    const double denom = h_diag * h_diag;
    SaliencyVector w(column.size());
    for (std::size_t i = 0; i < column.size(); ++i) {
        w[i] = (column[i] * column[i]) / denom;
    }
    if (counts != nullptr) {
        counts->mul += column.size() + 1;
        counts->div += column.size();
    }
    return w;
}

std::vector<std::size_t> top_k_indices(std::span<const double> w, std::size_t k, OpCounts* counts)
{
    if (k > w.size()) {
        throw ShapeError("top_k_indices: k=" + std::to_string(k) + " exceeds length " + std::to_string(w.size()));
    }
    std::vector<std::size_t> order(w.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (k == 0) {
        return {};
    }
    std::uint64_t comparisons = 0;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        ++comparisons;
        return w[a] > w[b] || (w[a] == w[b] && a < b);
    });
    if (counts != nullptr) {
        counts->compare += comparisons;
    }
    order.resize(k);
    return order;
}

MaskBlock mask_select(double sparsity, ConstMatrixView block, const InverseHessian& hinv, std::size_t s,
                      OpCounts* counts)
{
    const std::size_t d = block.rows();
    const std::size_t r = block.cols();
    if (s + r > hinv.dim()) {
        throw ShapeError("mask_select: columns [" + std::to_string(s) + "," + std::to_string(s + r) +
                         ") exceed Hessian dimension " + std::to_string(hinv.dim()));
    }
    MaskBlock out{BinaryMask(d, r, false), keep_count(sparsity, d)};
    std::vector<double> column(d);
    for (std::size_t k = 0; k < r; ++k) {
        for (std::size_t i = 0; i < d; ++i) {
            column[i] = block(i, k);
        }
        const SaliencyVector w = saliency(column, hinv.diag(s + k), counts, s + k);
        for (std::size_t row : top_k_indices(w, out.keep_count, counts)) {
            out.entries.set(row, k, true);
        }
    }
    return out;
}

} // namespace sparsegpt
