#include "sparsegpt/pruner.hpp"

#include <algorithm>
#include <numeric>

namespace sparsegpt {

namespace {

// Exact counterpart of mask_select. Within one column w^2 / h^2 shares the
// positive denominator, so ranking by |w| gives the same order; ties go to the
// smaller row.
void exact_mask_column(const RationalMatrix& w, const RationalMatrix& h, std::size_t col, std::size_t keep,
                       BinaryMask& mask)
{
    const std::size_t d = w.rows();
    if (sgn(h(col, col)) == 0) {
        throw DegenerateDiagonalError(col, "exact inverse-Hessian diagonal is zero");
    }
    std::vector<mpq_class> magnitude(d);
    for (std::size_t r = 0; r < d; ++r) {
        magnitude[r] = abs(w(r, col));
    }
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const int cmp = ::cmp(magnitude[a], magnitude[b]);
        return cmp > 0 || (cmp == 0 && a < b);
    });
    for (std::size_t r = 0; r < d; ++r) {
        mask.set(r, col, false);
    }
    for (std::size_t k = 0; k < keep; ++k) {
        mask.set(order[k], col, true);
    }
}

} // namespace

RationalMatrix exact_inverse_hessian(const RationalMatrix& calib, double lambda)
{
    if (calib.rows() == 0 || calib.cols() == 0) {
        throw ShapeError("exact_inverse_hessian: empty calibration matrix");
    }
    if (!(lambda > 0.0)) {
        throw DomainError("lambda must be > 0");
    }
    RationalMatrix gram = calib * calib.transposed();
    const mpq_class shift(lambda);
    for (std::size_t i = 0; i < gram.rows(); ++i) {
        gram(i, i) += shift;
    }
    return rational_inverse(gram);
}

ExactPruneResult prune_exact(const PruneConfig& cfg, const RationalMatrix& weights, const RationalMatrix& calib,
                             std::size_t oracle_limit)
{
    const std::size_t d = weights.rows();
    if (weights.cols() != d || calib.rows() != d || d == 0 || calib.cols() == 0) {
        throw ShapeError("prune_exact: need square weights and calibration with matching rows");
    }
    if (d > oracle_limit) {
        throw ConfigError("oracle limited to d <= " + std::to_string(oracle_limit));
    }
    if (!cfg.lambda) {
        throw ConfigError("prune_exact needs an explicit lambda");
    }
    cfg.validate(d);
    return prune_exact_with_inverse(cfg, weights, exact_inverse_hessian(calib, *cfg.lambda), oracle_limit);
}

ExactPruneResult prune_exact_with_inverse(const PruneConfig& cfg, const RationalMatrix& weights,
                                          const RationalMatrix& h, std::size_t oracle_limit)
{
    const std::size_t d = weights.rows();
    if (weights.cols() != d || h.rows() != d || h.cols() != d || d == 0) {
        throw ShapeError("prune_exact: weights and inverse Hessian must be square of the same size");
    }
    if (d > oracle_limit) {
        throw ConfigError("oracle limited to d <= " + std::to_string(oracle_limit));
    }
    cfg.validate(d);
    const std::size_t keep = keep_count(cfg.sparsity, d);

    ExactPruneResult res{weights, BinaryMask(d, d, true)};
    RationalMatrix& w = res.weights;
    RationalMatrix err(d, cfg.block);

    for (std::size_t i = 0; i < d; i += cfg.block) {
        const std::size_t end = std::min(i + cfg.block, d);
        for (std::size_t j = i; j < end; ++j) {
            if (j % cfg.mask_block == 0) {
                const std::size_t stop = std::min(j + cfg.mask_block, d);
                for (std::size_t c = j; c < stop; ++c) {
                    exact_mask_column(w, h, c, keep, res.mask);
                }
            }
            const std::size_t slot = j - i;
            for (std::size_t r = 0; r < d; ++r) {
                err(r, slot) = res.mask(r, j) ? mpq_class(0) : mpq_class(w(r, j) / h(j, j));
            }
            for (std::size_t r = 0; r < d; ++r) {
                if (err(r, slot) == 0) {
                    continue;
                }
                for (std::size_t c = j; c < end; ++c) {
                    w(r, c) -= err(r, slot) * h(j, c);
                }
            }
        }
        for (std::size_t r = 0; r < d; ++r) {
            for (std::size_t c = end; c < d; ++c) {
                mpq_class acc = 0;
                for (std::size_t k = 0; k < end - i; ++k) {
                    acc += err(r, k) * h(i + k, c);
                }
                w(r, c) -= acc;
            }
        }
        for (std::size_t r = 0; r < d; ++r) {
            for (std::size_t k = 0; k < cfg.block; ++k) {
                err(r, k) = 0;
            }
        }
    }

    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            if (!res.mask(r, c)) {
                w(r, c) = 0;
            }
        }
    }
    return res;
}

} // namespace sparsegpt
