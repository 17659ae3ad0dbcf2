#pragma once

#include "sparsegpt/matrix.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace sparsegpt {

/// omega(1, 1, a): exponent of multiplying a d x d matrix by a d x d^a matrix,
/// as a piecewise-linear curve through user-supplied anchors.
class OmegaCurve {
public:
    struct Anchor {
        double a;
        double omega;
    };

    /// Anchors must start at (0, 2), end at a = 1, have strictly increasing a,
    /// non-decreasing omega, and stay inside [0, 1] x [2, 3].
    explicit OmegaCurve(std::vector<Anchor> anchors);

    /// {(0, 2), (alpha, 2), (1, omega)} with alpha = 0.321 and omega = 2.371.
    static OmegaCurve default_curve();
    /// omega(1, 1, a) = 2 + a: schoolbook multiplication.
    static OmegaCurve classical();
    /// CSV with header `a,omega`.
    static OmegaCurve from_csv(std::istream& in);
    static OmegaCurve from_csv_file(const std::string& path);

    /// Copy with (a, omega) inserted, replacing an anchor at the same a.
    OmegaCurve with_anchor(double a, double omega) const;

    /// DomainError unless 0 <= a <= 1.
    double evaluate(double a) const;
    /// omega(1, 1, 1)
    double omega() const { return evaluate(1.0); }
    /// End of the initial plateau at 2.
    double alpha() const noexcept;

    const std::vector<Anchor>& anchors() const noexcept { return anchors_; }

private:
    std::vector<Anchor> anchors_;
};

inline constexpr double kDefaultOmega = 2.371;
inline constexpr double kDefaultAlpha = 0.321;

/// Exponents of the three cost terms of a lazily blocked run with B = d^a.
struct CostReport {
    double a = 0.0;
    /// omega, from forming and inverting the Hessian
    double hessian = 0.0;
    /// 2 + a, from the rank-1 updates inside each block
    double inner = 0.0;
    /// 1 + omega(1, 1, a) - a, from the batched flushes
    double outer = 0.0;
    /// max of the three
    double total = 0.0;
};

CostReport cost_report(const OmegaCurve& curve, double a);

struct BlockExponent {
    double a = 0.0;
    double total = 0.0;
};

inline constexpr double kDefaultGridStep = 1e-4;

/// Grid search over a in [0, 1] minimizing cost_report().total; ties keep the
/// smaller a. DomainError unless 0 < step <= 0.01.
BlockExponent optimize_block_exponent(const OmegaCurve& curve, double step = kDefaultGridStep);

/// Closed-form op counts of the error, inner, outer and finalize phases of
/// prune_lazy for a d x d problem with block B. ConfigError unless B | d.
/// Hessian and mask phases are left at zero.
FlopLedger predicted_flops(std::size_t d, std::size_t block, const MatMulBackend& backend);

} // namespace sparsegpt
