#include "sparsegpt/cli.hpp"

#include "sparsegpt/bench.hpp"
#include "sparsegpt/costmodel.hpp"
#include "sparsegpt/pruner.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>

namespace sparsegpt::cli {

namespace {

constexpr double kVerifyTolerance = 1e-9;

struct PruneArgs {
    std::string weights;
    std::string calib;
    double sparsity = 0.5;
    std::size_t block = 0;
    std::size_t mask_block = 0;
    std::string lambda = "auto";
    std::string backend = "classical";
    std::string mode = "deterministic";
    std::string out;
    std::string mask_out;
    std::string stats;
};

struct VerifyArgs {
    std::size_t d = 8;
    std::uint64_t seed = 0;
    double sparsity = 0.5;
    std::size_t block = 1;
    std::size_t mask_block = 1;
    bool oracle = false;
};

struct BenchArgs {
    std::vector<std::size_t> dims;
    std::vector<double> exponents{0.5};
    std::vector<std::string> backends{"classical"};
    std::size_t repeats = 1;
    std::string metric = "flops";
    std::uint64_t seed = 0;
    std::string mode = "deterministic";
    std::string out;
    std::string summary;
};

struct CostArgs {
    std::string table;
    double grid = kDefaultGridStep;
    std::optional<double> a;
};

/// Usage-level failure (exit 1) detected after CLI11 parsing.
class UsageError : public Error {
public:
    using Error::Error;
};

ExecMode parse_mode(const std::string& s)
{
    if (s == "deterministic") {
        return ExecMode::Deterministic;
    }
    if (s == "performance") {
        return ExecMode::Performance;
    }
    throw UsageError("--mode must be deterministic|performance");
}

std::optional<double> parse_lambda(const std::string& s)
{
    if (s == "auto") {
        return std::nullopt;
    }
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw UsageError("--lambda must be a number or 'auto'");
    }
    if (!(std::isfinite(v) && v > 0.0)) {
        throw UsageError("--lambda must be > 0");
    }
    return v;
}

nlohmann::json ledger_json(const FlopLedger& ledger)
{
    nlohmann::json j = nlohmann::json::object();
    for (Phase p : kAllPhases) {
        const OpCounts& c = ledger[p];
        j[std::string(phase_name(p))] = {{"mul", c.mul}, {"add", c.add}, {"div", c.div}, {"compare", c.compare}};
    }
    return j;
}

int cmd_prune(const PruneArgs& args, std::ostream& out)
{
    PruneConfig cfg;
    cfg.sparsity = args.sparsity;
    cfg.block = args.block;
    cfg.mask_block = args.mask_block;
    cfg.lambda = parse_lambda(args.lambda);
    cfg.backend = MatMulBackend::parse(args.backend);
    cfg.mode = parse_mode(args.mode);

    const DenseMatrix w = read_matrix(args.weights);
    const DenseMatrix x = read_matrix(args.calib);
    cfg.validate(w.cols());

    const PruneResult res = prune_lazy(cfg, w, x);
    write_matrix(args.out, res.weights);
    if (!args.mask_out.empty()) {
        write_matrix(args.mask_out, res.mask.to_dense());
    }

    const std::size_t total = res.weights.size();
    std::size_t zeros = 0;
    for (double v : res.weights.values()) {
        zeros += v == 0.0 ? 1 : 0;
    }
    const double achieved = total == 0 ? 0.0 : static_cast<double>(zeros) / static_cast<double>(total);

    if (!args.stats.empty()) {
        nlohmann::json stats;
        stats["schema"] = 1;
        stats["config"] = {{"sparsity", cfg.sparsity},
                           {"block", cfg.block},
                           {"mask_block", cfg.mask_block},
                           {"lambda", args.lambda},
                           {"backend", cfg.backend.name()},
                           {"mode", args.mode},
                           {"d", w.cols()},
                           {"calib_cols", x.cols()}};
        stats["flops"] = ledger_json(res.ledger);
        nlohmann::json secs = nlohmann::json::object();
        for (Phase p : kAllPhases) {
            secs[std::string(phase_name(p))] = res.seconds_in(p);
        }
        stats["seconds"] = secs;
        stats["achieved_sparsity"] = achieved;
        std::ofstream f(args.stats, std::ios::trunc);
        if (!f) {
            throw FormatError("cannot open '" + args.stats + "' for writing");
        }
        f << stats.dump(2) << '\n';
    }
    out << "pruned " << w.rows() << "x" << w.cols() << " weights, achieved sparsity " << achieved << '\n';
    return kExitOk;
}

int cmd_verify(const VerifyArgs& args, std::ostream& out)
{
    if (args.oracle && args.d > kDefaultOracleLimit) {
        throw UsageError("oracle limited to d <= " + std::to_string(kDefaultOracleLimit));
    }
    PruneConfig cfg;
    cfg.sparsity = args.sparsity;
    cfg.block = args.block;
    cfg.mask_block = args.mask_block;
    cfg.lambda = 1.0;
    cfg.validate(args.d);

    const Instance inst = generate_integer_instance(args.d, args.seed);
    const PruneResult lazy = prune_lazy(cfg, inst.weights, inst.calib);
    const PruneResult eager = prune_eager(cfg, inst.weights, inst.calib);

    bool ok = true;
    const double eager_delta = max_abs_diff(lazy.weights, eager.weights);
    const bool eager_mask = lazy.mask == eager.mask;
    ok = ok && eager_delta <= kVerifyTolerance && eager_mask;
    out << std::setprecision(6);
    out << "lazy vs eager: max |dW| = " << eager_delta << ", masks " << (eager_mask ? "identical" : "DIFFER")
        << '\n';

    if (args.oracle) {
        const ExactPruneResult exact = prune_exact(cfg, RationalMatrix::from_dense(inst.weights),
                                                   RationalMatrix::from_dense(inst.calib));
        const double exact_delta = max_abs_error(exact.weights, lazy.weights);
        const bool exact_mask = lazy.mask == exact.mask;
        ok = ok && exact_delta <= kVerifyTolerance && exact_mask;
        out << "lazy vs exact: max |dW| = " << exact_delta << ", masks " << (exact_mask ? "identical" : "DIFFER")
            << '\n';
    }
    const OpCounts& outer = lazy.ledger[Phase::Outer];
    out << "outer-phase flops: mul=" << outer.mul << " add=" << outer.add << '\n';
    out << "inner-phase flops: mul=" << lazy.ledger[Phase::Inner].mul << '\n';
    out << (ok ? "PASS" : "FAIL") << '\n';
    return ok ? kExitOk : kExitNumerical;
}

void print_slope_table(const std::vector<BenchRecord>& records, const BenchPlan& plan, std::ostream& out,
                       nlohmann::json& summary)
{
    std::set<std::size_t> dims;
    for (const auto& r : records) {
        dims.insert(r.d);
    }
    if (dims.size() < 3) {
        out << "slope fitting skipped: needs >= 3 dims (have " << dims.size() << ")\n";
        return;
    }
    std::vector<std::string> metrics;
    if (plan.metric != BenchMetric::Walltime) {
        metrics = {"mul", "compare"};
    }
    if (plan.metric != BenchMetric::Flops) {
        metrics.push_back("seconds");
    }
    out << std::fixed << std::setprecision(4);
    out << "a_nominal  a_eff   backend    phase     metric   slope    r2\n";
    summary["fits"] = nlohmann::json::array();
    for (double a : plan.block_exponents) {
        for (const auto& backend : plan.backends) {
            std::vector<BenchRecord> cell;
            for (const auto& r : records) {
                if (r.a_nominal == a && r.backend == backend.name()) {
                    cell.push_back(r);
                }
            }
            if (cell.empty()) {
                continue;
            }
            const double a_eff = effective_block_exponent(cell);
            for (const auto& metric : metrics) {
                for (Phase p : kAllPhases) {
                    const std::string phase(phase_name(p));
                    SlopeFit fit;
                    try {
                        fit = fit_slopes(cell, phase, metric);
                    } catch (const InsufficientDataError&) {
                        continue;
                    }
                    out << std::setw(9) << a << "  " << std::setw(6) << a_eff << "  " << std::left << std::setw(10)
                        << backend.name() << " " << std::setw(9) << phase << " " << std::setw(8) << metric
                        << std::right << " " << std::setw(6) << fit.slope << "  " << fit.r_squared << '\n';
                    summary["fits"].push_back({{"a", a},
                                               {"a_effective", a_eff},
                                               {"backend", backend.name()},
                                               {"phase", phase},
                                               {"metric", metric},
                                               {"slope", fit.slope},
                                               {"intercept", fit.intercept},
                                               {"r_squared", fit.r_squared}});
                }
            }
        }
    }
    out.unsetf(std::ios::floatfield);
}

int cmd_bench(const BenchArgs& args, std::ostream& out)
{
    BenchPlan plan;
    plan.dims = args.dims;
    plan.block_exponents = args.exponents;
    plan.backends.clear();
    for (const auto& b : args.backends) {
        plan.backends.push_back(MatMulBackend::parse(b));
    }
    plan.repeats = args.repeats;
    plan.seed = args.seed;
    plan.metric = parse_metric(args.metric);
    plan.mode = parse_mode(args.mode);
    plan.validate();

    const std::vector<BenchRecord> records = run_sweep(plan);
    if (!args.out.empty()) {
        std::ofstream f(args.out, std::ios::trunc);
        if (!f) {
            throw FormatError("cannot open '" + args.out + "' for writing");
        }
        write_records_csv(f, records);
    }
    std::size_t failures = 0;
    for (const auto& r : records) {
        failures += r.phase == "failed" ? 1 : 0;
    }
    out << records.size() << " records";
    if (failures > 0) {
        out << ", " << failures << " failed cells";
    }
    out << '\n';

    nlohmann::json summary;
    summary["schema"] = 1;
    print_slope_table(records, plan, out, summary);
    if (!args.summary.empty()) {
        std::ofstream f(args.summary, std::ios::trunc);
        if (!f) {
            throw FormatError("cannot open '" + args.summary + "' for writing");
        }
        f << summary.dump(2) << '\n';
    }
    return failures == 0 ? kExitOk : kExitNumerical;
}

int cmd_costmodel(const CostArgs& args, std::ostream& out)
{
    const OmegaCurve curve = args.table.empty() ? OmegaCurve::default_curve() : OmegaCurve::from_csv_file(args.table);
    out << std::fixed << std::setprecision(4);
    if (args.a) {
        const CostReport r = cost_report(curve, *args.a);
        out << "a = " << r.a << "\n"
            << "hessian exponent = " << r.hessian << "\n"
            << "inner exponent = " << r.inner << "\n"
            << "outer exponent = " << r.outer << "\n"
            << "total exponent = " << r.total << '\n';
    } else {
        const BlockExponent best = optimize_block_exponent(curve, args.grid);
        const CostReport r = cost_report(curve, best.a);
        out << "a* = " << best.a << "\n"
            << "total exponent = " << best.total << "\n"
            << "terms: hessian " << r.hessian << ", inner " << r.inner << ", outer " << r.outer << '\n';
    }
    return kExitOk;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Blocked SparseGPT pruning with lazy updates, flop accounting and a cost model"};
    app.require_subcommand(1);

    PruneArgs prune;
    auto* prune_cmd = app.add_subcommand("prune", "prune a weight matrix against calibration inputs");
    prune_cmd->add_option("--weights", prune.weights, "weights (FMAT1, or CSV by .csv extension)")->required();
    prune_cmd->add_option("--calib", prune.calib, "calibration inputs X (d x N)")->required();
    prune_cmd->add_option("--sparsity", prune.sparsity, "fraction pruned per column")
        ->required()
        ->check(CLI::Range(0.0, 1.0));
    prune_cmd->add_option("--block", prune.block, "lazy block width B")->required()->check(CLI::PositiveNumber);
    prune_cmd->add_option("--mask-block", prune.mask_block, "mask block width B_s")
        ->required()
        ->check(CLI::PositiveNumber);
    prune_cmd->add_option("--lambda", prune.lambda, "regularizer, or 'auto'")->capture_default_str();
    prune_cmd->add_option("--backend", prune.backend, "classical|strassen")
        ->check(CLI::IsMember({"classical", "strassen"}))
        ->capture_default_str();
    prune_cmd->add_option("--mode", prune.mode, "deterministic|performance")
        ->check(CLI::IsMember({"deterministic", "performance"}))
        ->capture_default_str();
    prune_cmd->add_option("--out", prune.out, "pruned weights output")->required();
    prune_cmd->add_option("--mask-out", prune.mask_out, "mask output (0/1 values)");
    prune_cmd->add_option("--stats", prune.stats, "stats JSON output");

    VerifyArgs verify;
    auto* verify_cmd = app.add_subcommand("verify", "check lazy vs eager (and exact) pruning on a seeded instance");
    verify_cmd->add_option("--d", verify.d, "dimension")->required()->check(CLI::PositiveNumber);
    verify_cmd->add_option("--seed", verify.seed, "instance seed")->capture_default_str();
    verify_cmd->add_option("--sparsity", verify.sparsity)->check(CLI::Range(0.0, 1.0))->capture_default_str();
    verify_cmd->add_option("--block", verify.block)->check(CLI::PositiveNumber)->capture_default_str();
    verify_cmd->add_option("--mask-block", verify.mask_block)->check(CLI::PositiveNumber)->capture_default_str();
    verify_cmd->add_flag("--oracle", verify.oracle, "also compare against exact rational arithmetic");

    BenchArgs bench;
    auto* bench_cmd = app.add_subcommand("bench", "flop / wall-time scaling sweep");
    bench_cmd->add_option("--dims", bench.dims, "comma-separated dimensions")->delimiter(',')->required();
    bench_cmd->add_option("--a", bench.exponents, "comma-separated block exponents")
        ->delimiter(',')
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    bench_cmd->add_option("--backend", bench.backends, "comma-separated backends")
        ->delimiter(',')
        ->check(CLI::IsMember({"classical", "strassen"}))
        ->capture_default_str();
    bench_cmd->add_option("--repeats", bench.repeats)->check(CLI::PositiveNumber)->capture_default_str();
    bench_cmd->add_option("--metric", bench.metric, "flops|walltime|both")
        ->check(CLI::IsMember({"flops", "walltime", "both"}))
        ->capture_default_str();
    bench_cmd->add_option("--seed", bench.seed)->capture_default_str();
    bench_cmd->add_option("--mode", bench.mode)
        ->check(CLI::IsMember({"deterministic", "performance"}))
        ->capture_default_str();
    bench_cmd->add_option("--out", bench.out, "records CSV output");
    bench_cmd->add_option("--summary", bench.summary, "slope-fit JSON output");

    CostArgs cost;
    auto* cost_cmd = app.add_subcommand("costmodel", "cost exponents for B = d^a");
    cost_cmd->add_option("--omega-table", cost.table, "CSV with header a,omega");
    cost_cmd->add_option("--grid", cost.grid, "grid step for the a* search")
        ->check(CLI::Range(1e-12, 0.01))
        ->capture_default_str();
    cost_cmd->add_option("--a", cost.a, "report a single block exponent")->check(CLI::Range(0.0, 1.0));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
            app.exit(e, out, err);
            return kExitOk;
        }
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        if (prune_cmd->parsed()) {
            return cmd_prune(prune, out);
        }
        if (verify_cmd->parsed()) {
            return cmd_verify(verify, out);
        }
        if (bench_cmd->parsed()) {
            return cmd_bench(bench, out);
        }
        return cmd_costmodel(cost, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const FormatError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
}

} // namespace sparsegpt::cli
