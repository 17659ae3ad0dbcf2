#pragma once

#include "sparsegpt/hessian.hpp"
#include "sparsegpt/mask.hpp"
#include "sparsegpt/matrix.hpp"
#include "sparsegpt/rational.hpp"

#include <array>
#include <cstddef>
#include <optional>

namespace sparsegpt {

/// Parameters of one pruning run.
struct PruneConfig {
    /// fraction of weights removed per column, in [0, 1]
    double sparsity = 0.5;
    /// lazy update block width B
    std::size_t block = 1;
    /// adaptive mask block width B_s; must divide `block`
    std::size_t mask_block = 1;
    /// regularizer; nullopt selects the automatic value
    std::optional<double> lambda;
    MatMulBackend backend = MatMulBackend::classical();
    ExecMode mode = ExecMode::Deterministic;

    /// Throws ConfigError unless 1 <= mask_block <= block <= d,
    /// mask_block | block, and sparsity in [0, 1].
    void validate(std::size_t d) const;
};

/// d x B buffer of pending compensation columns for the current lazy block.
/// Columns at index >= filled() are exactly zero.
class ErrorBuffer {
public:
    ErrorBuffer(std::size_t rows, std::size_t width) : e_(rows, width) {}

    std::size_t width() const noexcept { return e_.cols(); }
    std::size_t filled() const noexcept { return filled_; }

    /// Column slot for the next error vector.
    std::size_t push() noexcept { return filled_++; }
    double& at(std::size_t row, std::size_t col) noexcept { return e_(row, col); }

    /// Zero the used columns and start a new block.
    void reset() noexcept;

    /// The first `cols` columns.
    ConstMatrixView leading(std::size_t cols) const { return e_.view({0, e_.rows()}, {0, cols}); }

    bool is_consistent() const noexcept;

private:
    DenseMatrix e_;
    std::size_t filled_ = 0;
};

using PhaseSeconds = std::array<double, kAllPhases.size()>;

struct PruneResult {
    DenseMatrix weights;
    BinaryMask mask;
    FlopLedger ledger;
    /// wall-clock seconds per phase (informational; not part of equality)
    PhaseSeconds seconds{};

    double seconds_in(Phase p) const noexcept { return seconds[static_cast<std::size_t>(p)]; }
};

/// Blocked pruning with lazily batched compensation updates. Columns are
/// processed in half-open blocks [i, i + B); a mask is selected for
/// [j, j + B_s) whenever j % B_s == 0; each column's error is applied at once
/// to the rest of its block (inner phase) and the whole block's errors are
/// flushed into the trailing columns with one product (outer phase).
PruneResult prune_lazy(const PruneConfig& cfg, ConstMatrixView weights, ConstMatrixView calib);

/// Unbatched reference: every column's error is applied immediately to all
/// trailing columns. `cfg.block` is ignored apart from validation of B_s.
PruneResult prune_eager(const PruneConfig& cfg, ConstMatrixView weights, ConstMatrixView calib);

struct ExactPruneResult {
    RationalMatrix weights;
    BinaryMask mask;
};

inline constexpr std::size_t kDefaultOracleLimit = 16;

/// The lazy schedule in exact rational arithmetic. `cfg.lambda` must be set;
/// its binary64 value is used exactly.
ExactPruneResult prune_exact(const PruneConfig& cfg, const RationalMatrix& weights, const RationalMatrix& calib,
                             std::size_t oracle_limit = kDefaultOracleLimit);

/// (calib calib^T + lambda I)^{-1} in exact arithmetic, lambda taken at its binary64 value.
RationalMatrix exact_inverse_hessian(const RationalMatrix& calib, double lambda);

/// prune_exact against a precomputed exact inverse Hessian; `cfg.lambda` is ignored.
ExactPruneResult prune_exact_with_inverse(const PruneConfig& cfg, const RationalMatrix& weights,
                                          const RationalMatrix& hinv,
                                          std::size_t oracle_limit = kDefaultOracleLimit);

} // namespace sparsegpt
