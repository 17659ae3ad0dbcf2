#include "sparsegpt/bench.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

namespace sparsegpt {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::vector<double> uniform_block(std::uint64_t seed, std::uint64_t offset, std::size_t count)
{
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = 2.0 * counter_uniform(seed, offset + i) - 1.0;
    }
    return out;
}

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct Line {
    double slope;
    double intercept;
    double r_squared;
};

Line least_squares(const std::vector<double>& x, const std::vector<double>& y)
{
    const double n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    Line line{};
    line.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    line.intercept = my - line.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (line.intercept + line.slope * x[i]);
        sse += r * r;
    }
    // constant data is fit perfectly by a flat line
    line.r_squared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
    return line;
}

void emit_flops(std::vector<BenchRecord>& out, const BenchRecord& base, const FlopLedger& ledger)
{
    for (Phase p : kAllPhases) {
        const OpCounts& c = ledger[p];
        const std::pair<const char*, std::uint64_t> counters[] = {
            {"mul", c.mul}, {"add", c.add}, {"div", c.div}, {"compare", c.compare}};
        for (const auto& [name, value] : counters) {
            if (value == 0) {
                continue;
            }
            BenchRecord r = base;
            r.phase = std::string(phase_name(p));
            r.metric = name;
            r.value = static_cast<double>(value);
            out.push_back(std::move(r));
        }
    }
}

void emit_seconds(std::vector<BenchRecord>& out, const BenchRecord& base, const PruneResult& res)
{
    for (Phase p : kAllPhases) {
        const double s = res.seconds_in(p);
        if (s <= 0.0) {
            continue;
        }
        BenchRecord r = base;
        r.phase = std::string(phase_name(p));
        r.metric = "seconds";
        r.value = s;
        out.push_back(std::move(r));
    }
}

} // namespace

std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t index) noexcept
{
    std::uint64_t z = seed + (index + 1) * kGolden;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double counter_uniform(std::uint64_t seed, std::uint64_t index) noexcept
{
    return static_cast<double>(counter_hash(seed, index) >> 11) * 0x1.0p-53;
}

Instance generate_instance(std::size_t d, std::uint64_t seed)
{
    const std::size_t n = d * d;
    return {DenseMatrix(d, d, uniform_block(seed, 0, n)), DenseMatrix(d, d, uniform_block(seed, n, n))};
}

Instance generate_integer_instance(std::size_t d, std::uint64_t seed, int lo, int hi)
{
    if (hi < lo) {
        throw ConfigError("integer instance range is empty");
    }
    const std::size_t n = d * d;
    const double span = static_cast<double>(hi - lo + 1);
    auto draw = [&](std::uint64_t offset) {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = std::floor(counter_uniform(seed, offset + i) * span) + lo;
        }
        return DenseMatrix(d, d, v);
    };
    return {draw(0), draw(n)};
}

BenchMetric parse_metric(std::string_view name)
{
    if (name == "flops") {
        return BenchMetric::Flops;
    }
    if (name == "walltime") {
        return BenchMetric::Walltime;
    }
    if (name == "both") {
        return BenchMetric::Both;
    }
    throw ConfigError("unknown metric '" + std::string(name) + "' (expected flops|walltime|both)");
}

void BenchPlan::validate() const
{
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (dims[i] < 8) {
            throw ConfigError("bench dims must be >= 8");
        }
        if (i > 0 && dims[i] <= dims[i - 1]) {
            throw ConfigError("bench dims must be strictly increasing");
        }
    }
    if (repeats < 1) {
        throw ConfigError("repeats must be >= 1");
    }
    for (double a : block_exponents) {
        if (!(a >= 0.0 && a <= 1.0)) {
            throw ConfigError("block exponents must lie in [0, 1]");
        }
    }
    if (!(sparsity >= 0.0 && sparsity <= 1.0)) {
        throw ConfigError("sparsity must lie in [0, 1]");
    }
}

std::size_t snap_block(std::size_t d, double a)
{
    if (d == 0) {
        throw ConfigError("snap_block needs d >= 1");
    }
    const double target = a * std::log(static_cast<double>(d));
    std::size_t best = 1;
    double best_dist = std::abs(target);
    for (std::size_t b = 2; b <= d; ++b) {
        if (d % b != 0) {
            continue;
        }
        const double dist = std::abs(std::log(static_cast<double>(b)) - target);
        // divisors ascend, so <= sends halfway cases to the larger one
        if (dist <= best_dist + 1e-12) {
            best = b;
            best_dist = std::min(dist, best_dist);
        }
    }
    return best;
}

std::vector<BenchRecord> run_sweep(const BenchPlan& plan)
{
    plan.validate();
    std::vector<BenchRecord> out;
    for (std::size_t d : plan.dims) {
        for (double a : plan.block_exponents) {
            const std::size_t block = snap_block(d, a);
            for (const MatMulBackend& backend : plan.backends) {
                std::optional<FlopLedger> first;
                for (std::size_t rep = 0; rep < plan.repeats; ++rep) {
                    BenchRecord base;
                    base.d = d;
                    base.block = block;
                    base.a_nominal = a;
                    base.a_effective = d > 1 ? std::log(static_cast<double>(block)) / std::log(static_cast<double>(d))
                                             : 0.0;
                    base.backend = backend.name();
                    base.repeat = rep;
                    try {
                        const Instance inst = generate_instance(d, plan.seed);
                        PruneConfig cfg;
                        cfg.sparsity = plan.sparsity;
                        cfg.block = block;
                        cfg.mask_block = 1;
                        cfg.backend = backend;
                        cfg.mode = plan.mode;
                        const PruneResult res = prune_lazy(cfg, inst.weights, inst.calib);
                        if (!first) {
                            first = res.ledger;
                        } else if (!(*first == res.ledger)) {
                            throw std::logic_error("flop ledger differs between repeats");
                        }
                        if (plan.metric != BenchMetric::Walltime) {
                            emit_flops(out, base, res.ledger);
                        }
                        if (plan.metric != BenchMetric::Flops) {
                            emit_seconds(out, base, res);
                        }
                    } catch (const Error& e) {
                        BenchRecord r = base;
                        r.phase = "failed";
                        r.metric = "error";
                        r.value = 0.0;
                        out.push_back(std::move(r));
                        break;
                    }
                }
            }
        }
    }
    return out;
}

void write_records_csv(std::ostream& out, const std::vector<BenchRecord>& records)
{
    out << "d,B,a_effective,backend,phase,metric,value,repeat\n";
    const auto old_precision = out.precision(17);
    for (const auto& r : records) {
        out << r.d << ',' << r.block << ',' << r.a_effective << ',' << r.backend << ',' << r.phase << ','
            << r.metric << ',' << r.value << ',' << r.repeat << '\n';
    }
    out.precision(old_precision);
}

SlopeFit fit_slopes(const std::vector<BenchRecord>& records, std::string_view phase, std::string_view metric)
{
    std::map<std::size_t, std::vector<double>> by_dim;
    for (const auto& r : records) {
        if (r.phase == phase && r.metric == metric && r.value > 0.0) {
            by_dim[r.d].push_back(r.value);
        }
    }
    if (by_dim.size() < 3) {
        throw InsufficientDataError("slope fit for phase '" + std::string(phase) + "' needs >= 3 dims, have " +
                                    std::to_string(by_dim.size()));
    }
    std::vector<double> x;
    std::vector<double> y;
    for (auto& [d, values] : by_dim) {
        x.push_back(std::log(static_cast<double>(d)));
        y.push_back(std::log(median(values)));
    }
    const Line line = least_squares(x, y);
    return {std::string(phase), line.slope, line.intercept, line.r_squared};
}

double effective_block_exponent(const std::vector<BenchRecord>& records)
{
    std::map<std::size_t, std::size_t> block_by_dim;
    for (const auto& r : records) {
        block_by_dim.emplace(r.d, r.block);
    }
    if (block_by_dim.size() < 2) {
        throw InsufficientDataError("effective block exponent needs >= 2 dims");
    }
    std::vector<double> x;
    std::vector<double> y;
    for (const auto& [d, b] : block_by_dim) {
        x.push_back(std::log(static_cast<double>(d)));
        y.push_back(std::log(static_cast<double>(b)));
    }
    return least_squares(x, y).slope;
}

std::size_t memory_probe(std::size_t d, std::size_t block, std::uint64_t seed)
{
    const std::size_t baseline = memory::current_bytes();
    memory::reset_peak();
    {
        const Instance inst = generate_instance(d, seed);
        PruneConfig cfg;
        cfg.block = block;
        cfg.mask_block = 1;
        const PruneResult res = prune_lazy(cfg, inst.weights, inst.calib);
        (void)res;
    }
    return memory::peak_bytes() - baseline;
}

} // namespace sparsegpt
