#include "sparsegpt/pruner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace sparsegpt {

namespace {

class PhaseTimer {
public:
    PhaseTimer(PhaseSeconds& seconds, Phase phase)
        : slot_(seconds[static_cast<std::size_t>(phase)]), start_(std::chrono::steady_clock::now())
    {
    }
    ~PhaseTimer()
    {
        slot_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }
    PhaseTimer(const PhaseTimer&) = delete;
    PhaseTimer& operator=(const PhaseTimer&) = delete;

private:
    double& slot_;
    std::chrono::steady_clock::time_point start_;
};

void check_inputs(ConstMatrixView weights, ConstMatrixView calib)
{
    if (weights.rows() != weights.cols()) {
        throw ShapeError("weights must be square, got " + std::to_string(weights.rows()) + "x" +
                         std::to_string(weights.cols()));
    }
    if (calib.rows() != weights.cols()) {
        throw ShapeError("calibration rows (" + std::to_string(calib.rows()) + ") must equal weight columns (" +
                         std::to_string(weights.cols()) + ")");
    }
    if (weights.rows() == 0) {
        throw ShapeError("weights must be at least 1x1");
    }
    require_finite(weights, "weights");
}

void select_mask_block(const PruneConfig& cfg, ConstMatrixView w, const InverseHessian& hinv, std::size_t j,
                       BinaryMask& mask, FlopLedger& ledger)
{
    const std::size_t d = w.rows();
    const std::size_t width = std::min(cfg.mask_block, d - j);
    const MaskBlock block = mask_select(cfg.sparsity, w.view({0, d}, {j, j + width}), hinv, j, &ledger[Phase::Mask]);
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t k = 0; k < width; ++k) {
            mask.set(r, j + k, block.entries(r, k));
        }
    }
}

// W <- W o M. Adding +0.0 turns the -0.0 produced by negative * 0 into +0.0.
void finalize(DenseMatrix& w, const BinaryMask& mask, FlopLedger& ledger)
{
    const std::size_t d = w.rows();
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            w(r, c) = w(r, c) * (mask(r, c) ? 1.0 : 0.0) + 0.0;
        }
    }
    ledger[Phase::Finalize].mul += static_cast<std::uint64_t>(d) * d;
}

} // namespace

void PruneConfig::validate(std::size_t d) const
{
    if (!(sparsity >= 0.0 && sparsity <= 1.0)) {
        throw ConfigError("sparsity must lie in [0, 1]");
    }
    if (mask_block == 0 || block == 0) {
        throw ConfigError("block and mask block must be >= 1");
    }
    if (block % mask_block != 0) {
        throw ConfigError("mask block must divide block");
    }
    if (block > d) {
        throw ConfigError("block (" + std::to_string(block) + ") exceeds dimension " + std::to_string(d));
    }
    if (lambda && !(std::isfinite(*lambda) && *lambda > 0.0)) {
        throw ConfigError("lambda must be finite and > 0");
    }
}

void ErrorBuffer::reset() noexcept
{
    for (std::size_t r = 0; r < e_.rows(); ++r) {
        for (std::size_t c = 0; c < filled_; ++c) {
            e_(r, c) = 0.0;
        }
    }
    filled_ = 0;
}

bool ErrorBuffer::is_consistent() const noexcept
{
    if (filled_ > e_.cols()) {
        return false;
    }
    for (std::size_t r = 0; r < e_.rows(); ++r) {
        for (std::size_t c = filled_; c < e_.cols(); ++c) {
            if (e_(r, c) != 0.0) {
                return false;
            }
        }
    }
    return true;
}

PruneResult prune_lazy(const PruneConfig& cfg, ConstMatrixView weights, ConstMatrixView calib)
{
    check_inputs(weights, calib);
    const std::size_t d = weights.rows();
    cfg.validate(d);

    PruneResult res;
    res.weights = DenseMatrix(weights);
    res.mask = BinaryMask(d, d, true);
    DenseMatrix& w = res.weights;
    FlopLedger& ledger = res.ledger;

    InverseHessian hinv;
    {
        PhaseTimer t(res.seconds, Phase::Hessian);
        hinv = build_inverse_hessian(calib, cfg.lambda, &ledger[Phase::Hessian], MatMulBackend::classical(), cfg.mode);
    }
    const DenseMatrix& h = hinv.h;

    ErrorBuffer err(d, cfg.block);
    for (std::size_t i = 0; i < d; i += cfg.block) {
        const std::size_t end = std::min(i + cfg.block, d);
        for (std::size_t j = i; j < end; ++j) {
            if (j % cfg.mask_block == 0) {
                PhaseTimer t(res.seconds, Phase::Mask);
                select_mask_block(cfg, w, hinv, j, res.mask, ledger);
            }
            const std::size_t slot = err.push();
            {
                PhaseTimer t(res.seconds, Phase::Error);
                const double hjj = h(j, j);
                for (std::size_t r = 0; r < d; ++r) {
                    err.at(r, slot) = ((res.mask(r, j) ? 0.0 : 1.0) * w(r, j)) / hjj;
                }
                ledger[Phase::Error].mul += d;
                ledger[Phase::Error].div += d;
            }
            {
                PhaseTimer t(res.seconds, Phase::Inner);
                const double* hrow = h.view().row(j).data();
                for (std::size_t r = 0; r < d; ++r) {
                    const double e = err.at(r, slot);
                    double* wrow = w.view().row(r).data();
                    for (std::size_t c = j; c < end; ++c) {
                        wrow[c] -= e * hrow[c];
                    }
                }
                const std::uint64_t ops = static_cast<std::uint64_t>(d) * (end - j);
                ledger[Phase::Inner].mul += ops;
                ledger[Phase::Inner].add += ops;
            }
        }
        if (end < d) {
            PhaseTimer t(res.seconds, Phase::Outer);
            const DenseMatrix update =
                matmul(err.leading(end - i), h.view({i, end}, {end, d}), cfg.backend, &ledger[Phase::Outer], cfg.mode);
            for (std::size_t r = 0; r < d; ++r) {
                for (std::size_t c = end; c < d; ++c) {
                    w(r, c) -= update(r, c - end);
                }
            }
            ledger[Phase::Outer].add += static_cast<std::uint64_t>(d) * (d - end);
        }
        err.reset();
    }

    {
        PhaseTimer t(res.seconds, Phase::Finalize);
        finalize(w, res.mask, ledger);
    }
    require_finite(w, "pruned weights");
    return res;
}

PruneResult prune_eager(const PruneConfig& cfg, ConstMatrixView weights, ConstMatrixView calib)
{
    check_inputs(weights, calib);
    const std::size_t d = weights.rows();
    cfg.validate(d);

    PruneResult res;
    res.weights = DenseMatrix(weights);
    res.mask = BinaryMask(d, d, true);
    DenseMatrix& w = res.weights;
    FlopLedger& ledger = res.ledger;

    InverseHessian hinv;
    {
        PhaseTimer t(res.seconds, Phase::Hessian);
        hinv = build_inverse_hessian(calib, cfg.lambda, &ledger[Phase::Hessian], MatMulBackend::classical(), cfg.mode);
    }
    const DenseMatrix& h = hinv.h;

    std::vector<double> e(d);
    for (std::size_t j = 0; j < d; ++j) {
        if (j % cfg.mask_block == 0) {
            PhaseTimer t(res.seconds, Phase::Mask);
            select_mask_block(cfg, w, hinv, j, res.mask, ledger);
        }
        {
            PhaseTimer t(res.seconds, Phase::Error);
            for (std::size_t r = 0; r < d; ++r) {
                e[r] = ((res.mask(r, j) ? 0.0 : 1.0) * w(r, j)) / h(j, j);
            }
            ledger[Phase::Error].mul += d;
            ledger[Phase::Error].div += d;
        }
        PhaseTimer t(res.seconds, Phase::Inner);
        for (std::size_t r = 0; r < d; ++r) {
            for (std::size_t c = j; c < d; ++c) {
                w(r, c) -= e[r] * h(j, c);
            }
        }
        const std::uint64_t ops = static_cast<std::uint64_t>(d) * (d - j);
        ledger[Phase::Inner].mul += ops;
        ledger[Phase::Inner].add += ops;
    }

    {
        PhaseTimer t(res.seconds, Phase::Finalize);
        finalize(w, res.mask, ledger);
    }
    require_finite(w, "pruned weights");
    return res;
}

} // namespace sparsegpt
