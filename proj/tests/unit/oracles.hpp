#pragma once

// Test-only reference computations, kept independent of the library kernels.

#include "sparsegpt/bench.hpp"
#include "sparsegpt/matrix.hpp"
#include "sparsegpt/rational.hpp"

#include <cstdint>
#include <vector>

namespace oracle {

inline std::vector<std::vector<double>> triple_loop(const sparsegpt::DenseMatrix& a, const sparsegpt::DenseMatrix& b)
{
    std::vector<std::vector<double>> c(a.rows(), std::vector<double>(b.cols(), 0.0));
    for (std::size_t j = 0; j < b.cols(); ++j) {
        for (std::size_t i = 0; i < a.rows(); ++i) {
            for (std::size_t k = 0; k < a.cols(); ++k) {
                c[i][j] += a(i, k) * b(k, j);
            }
        }
    }
    return c;
}

/// Uniform [-1, 1) entries from the library's counter generator at an offset
/// no instance uses.
inline sparsegpt::DenseMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed)
{
    std::vector<double> v(rows * cols);
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = 2.0 * sparsegpt::counter_uniform(seed ^ 0x5eed5eedULL, (std::uint64_t{1} << 40) + i) - 1.0;
    }
    return sparsegpt::DenseMatrix(rows, cols, v);
}

inline sparsegpt::DenseMatrix random_integer_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed, int lo,
                                                   int hi)
{
    std::vector<double> v(rows * cols);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double u = sparsegpt::counter_uniform(seed ^ 0x1a7e57ULL, (std::uint64_t{1} << 41) + i);
        v[i] = static_cast<double>(lo + static_cast<int>(u * (hi - lo + 1)));
    }
    return sparsegpt::DenseMatrix(rows, cols, v);
}

/// G G^T + I, built with plain loops.
inline sparsegpt::DenseMatrix random_spd(std::size_t d, std::uint64_t seed)
{
    const auto g = random_matrix(d, d, seed);
    sparsegpt::DenseMatrix a(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            double s = i == j ? 1.0 : 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                s += g(i, k) * g(j, k);
            }
            a(i, j) = s;
        }
    }
    return a;
}

inline double residual_vs_identity(const sparsegpt::DenseMatrix& a, const sparsegpt::DenseMatrix& inv)
{
    const auto prod = triple_loop(a, inv);
    double worst = 0.0;
    for (std::size_t i = 0; i < prod.size(); ++i) {
        for (std::size_t j = 0; j < prod[i].size(); ++j) {
            const double target = i == j ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(prod[i][j] - target));
        }
    }
    return worst;
}

} // namespace oracle
