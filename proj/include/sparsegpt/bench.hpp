#pragma once

#include "sparsegpt/matrix.hpp"
#include "sparsegpt/pruner.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace sparsegpt {

// ---------------------------------------------------------------------------
// Seeded instances
// ---------------------------------------------------------------------------

/// Counter-based generator: the value at `index` of stream `seed` is
/// splitmix64(seed + (index + 1) * 0x9E3779B97F4A7C15).
std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t index) noexcept;

/// Top 53 bits of counter_hash scaled to [0, 1).
double counter_uniform(std::uint64_t seed, std::uint64_t index) noexcept;

struct Instance {
    DenseMatrix weights;
    DenseMatrix calib;
};

/// W and X (both d x d), entries uniform in [-1, 1): 2u - 1 with u from
/// counter_uniform. W takes indices [0, d^2), X takes [d^2, 2 d^2), row-major.
Instance generate_instance(std::size_t d, std::uint64_t seed);

/// Same layout, entries floor(u * (hi - lo + 1)) + lo, integers in [lo, hi].
Instance generate_integer_instance(std::size_t d, std::uint64_t seed, int lo = -4, int hi = 4);

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

enum class BenchMetric : std::uint8_t { Flops, Walltime, Both };

BenchMetric parse_metric(std::string_view name);

struct BenchPlan {
    std::vector<std::size_t> dims;
    std::vector<double> block_exponents;
    std::vector<MatMulBackend> backends{MatMulBackend::classical()};
    std::size_t repeats = 1;
    std::uint64_t seed = 0;
    BenchMetric metric = BenchMetric::Flops;
    double sparsity = 0.5;
    ExecMode mode = ExecMode::Deterministic;

    /// ConfigError unless dims >= 8 and strictly increasing, repeats >= 1,
    /// exponents in [0, 1].
    void validate() const;
};

/// Divisor of d nearest to d^a on a log scale; halfway cases round up.
std::size_t snap_block(std::size_t d, double a);

struct BenchRecord {
    std::size_t d = 0;
    std::size_t block = 0;
    double a_nominal = 0.0;
    double a_effective = 0.0;
    std::string backend;
    /// phase name, or "failed" when the cell aborted
    std::string phase;
    /// mul | add | div | compare | seconds | error
    std::string metric;
    double value = 0.0;
    std::size_t repeat = 0;
};

/// One prune_lazy run per (d, a, backend, repeat), with mask block 1. Flop
/// metrics emit one record per non-zero counter per phase; the walltime metric
/// emits per-phase seconds. A failing cell yields a single "failed" record.
std::vector<BenchRecord> run_sweep(const BenchPlan& plan);

/// CSV header: d,B,a_effective,backend,phase,metric,value,repeat
void write_records_csv(std::ostream& out, const std::vector<BenchRecord>& records);

struct SlopeFit {
    std::string phase;
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Least squares of log(value) on log(d) over the records matching phase and
/// metric (the caller restricts to one a / backend). Repeats are collapsed to
/// their median. InsufficientDataError below 3 distinct dims.
SlopeFit fit_slopes(const std::vector<BenchRecord>& records, std::string_view phase, std::string_view metric = "mul");

/// Least-squares slope of log(B) on log(d) across the distinct dims of the
/// records: the block exponent a sweep actually realized.
double effective_block_exponent(const std::vector<BenchRecord>& records);

/// Tracked peak bytes (matrix storage) over generating an instance and one
/// prune_lazy run with the given block and mask block 1.
std::size_t memory_probe(std::size_t d, std::size_t block, std::uint64_t seed = 0);

} // namespace sparsegpt
