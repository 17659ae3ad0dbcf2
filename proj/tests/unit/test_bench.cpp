#include "sparsegpt/bench.hpp"
#include "sparsegpt/costmodel.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace sparsegpt;

namespace {

std::vector<BenchRecord> select(const std::vector<BenchRecord>& records, std::string_view phase,
                                std::string_view metric)
{
    std::vector<BenchRecord> out;
    for (const auto& r : records) {
        if (r.phase == phase && r.metric == metric) {
            out.push_back(r);
        }
    }
    return out;
}

} // namespace

TEST_SUITE("bench")
{
    TEST_CASE("counter generator reference values")
    {
        // splitmix64 finalizer applied to seed + (index + 1) * golden gamma
        auto reference = [](std::uint64_t seed, std::uint64_t index) {
            std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
            z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
            return z ^ (z >> 31);
        };
        // first output of the canonical splitmix64 stream seeded with 0
        CHECK(counter_hash(0, 0) == 0xE220A8397B1DCDAFULL);
        for (std::uint64_t seed : {0ULL, 1ULL, 42ULL, ~0ULL}) {
            for (std::uint64_t i = 0; i < 50; ++i) {
                REQUIRE(counter_hash(seed, i) == reference(seed, i));
                const double u = counter_uniform(seed, i);
                REQUIRE(u >= 0.0);
                REQUIRE(u < 1.0);
                REQUIRE(u == std::ldexp(static_cast<double>(reference(seed, i) >> 11), -53));
            }
        }
    }

    TEST_CASE("instances are deterministic and seed-sensitive")
    {
        const auto a = generate_instance(16, 7);
        const auto b = generate_instance(16, 7);
        CHECK(a.weights == b.weights);
        CHECK(a.calib == b.calib);
        const auto c = generate_instance(16, 8);
        std::size_t differ = 0;
        for (std::size_t i = 0; i < a.weights.size(); ++i) {
            differ += a.weights.values()[i] != c.weights.values()[i] ? 1 : 0;
        }
        CHECK(differ > a.weights.size() * 9 / 10);
        for (double v : a.weights.values()) {
            REQUIRE(v >= -1.0);
            REQUIRE(v < 1.0);
        }
        // X continues the stream where W stops
        CHECK(a.calib(0, 0) == 2.0 * counter_uniform(7, 256) - 1.0);
    }

    TEST_CASE("integer instances")
    {
        const auto inst = generate_integer_instance(12, 3);
        bool saw_lo = false;
        bool saw_hi = false;
        for (double v : inst.weights.values()) {
            REQUIRE(v == std::floor(v));
            REQUIRE(v >= -4.0);
            REQUIRE(v <= 4.0);
            saw_lo = saw_lo || v == -4.0;
            saw_hi = saw_hi || v == 4.0;
        }
        CHECK(saw_lo);
        CHECK(saw_hi);
        CHECK(inst.weights(0, 0) == std::floor(counter_uniform(3, 0) * 9.0) - 4.0);
    }

    TEST_CASE("d = 1 runs end to end")
    {
        const auto inst = generate_instance(1, 0);
        PruneConfig cfg;
        cfg.sparsity = 1.0;
        const auto res = prune_lazy(cfg, inst.weights, inst.calib);
        CHECK(res.weights(0, 0) == 0.0);
    }

    TEST_CASE("snap_block")
    {
        CHECK(snap_block(64, 0.5) == 8);
        CHECK(snap_block(64, 0.0) == 1);
        CHECK(snap_block(64, 1.0) == 64);
        CHECK(snap_block(128, 0.5) == 16); // sqrt(128) sits halfway between 8 and 16
        CHECK(snap_block(12, 0.5) == 4); // 3 * 4 = 12: halfway again
        CHECK(snap_block(18, 0.4) == 3);
        CHECK(snap_block(13, 0.5) == 13);
        CHECK(snap_block(13, 0.4) == 1);
    }

    TEST_CASE("sweep flops match the closed forms")
    {
        BenchPlan plan;
        plan.dims = {8, 16};
        plan.block_exponents = {0.5};
        const auto records = run_sweep(plan);
        const auto inner = select(records, "inner", "mul");
        REQUIRE(inner.size() == 2);
        for (const auto& r : inner) {
            CHECK(r.value == static_cast<double>(r.d * r.d * (r.block + 1) / 2));
            const auto predicted = predicted_flops(r.d, r.block, MatMulBackend::classical());
            CHECK(r.value == static_cast<double>(predicted[Phase::Inner].mul));
        }
        CHECK(inner[0].block == 4); // sqrt(8) is halfway between 2 and 4
        CHECK(inner[1].block == 4);
        CHECK(select(records, "failed", "error").empty());
    }

    TEST_CASE("repeats produce identical flop values")
    {
        BenchPlan plan;
        plan.dims = {16};
        plan.block_exponents = {0.5};
        plan.repeats = 3;
        const auto outer = select(run_sweep(plan), "outer", "mul");
        REQUIRE(outer.size() == 3);
        CHECK(outer[0].value == outer[1].value);
        CHECK(outer[1].value == outer[2].value);
        CHECK(outer[2].repeat == 2);
    }

    TEST_CASE("walltime metric and empty plan")
    {
        BenchPlan plan;
        plan.block_exponents = {0.5};
        CHECK(run_sweep(plan).empty());
        plan.dims = {8};
        plan.metric = BenchMetric::Walltime;
        const auto records = run_sweep(plan);
        CHECK(select(records, "inner", "mul").empty());
        CHECK(select(records, "inner", "seconds").size() == 1);
    }

    TEST_CASE("plan validation")
    {
        BenchPlan plan;
        plan.block_exponents = {0.5};
        plan.dims = {4};
        CHECK_THROWS_AS(run_sweep(plan), ConfigError);
        plan.dims = {16, 8};
        CHECK_THROWS_AS(run_sweep(plan), ConfigError);
        plan.dims = {8};
        plan.block_exponents = {1.5};
        CHECK_THROWS_AS(run_sweep(plan), ConfigError);
        CHECK(parse_metric("flops") == BenchMetric::Flops);
        CHECK(parse_metric("walltime") == BenchMetric::Walltime);
        CHECK(parse_metric("both") == BenchMetric::Both);
        CHECK_THROWS_AS(parse_metric("joules"), ConfigError);
    }

    TEST_CASE("csv output")
    {
        BenchPlan plan;
        plan.dims = {8};
        plan.block_exponents = {1.0};
        std::ostringstream out;
        write_records_csv(out, run_sweep(plan));
        const auto text = out.str();
        CHECK(text.rfind("d,B,a_effective,backend,phase,metric,value,repeat\n", 0) == 0);
        CHECK(text.find("8,8,1,classical,inner,mul,288,0\n") != std::string::npos);
    }

    TEST_CASE("slope fits")
    {
        BenchPlan plan;
        plan.dims = {64, 256, 1024};
        plan.block_exponents = {0.5};
        const auto records = run_sweep(plan);
        const auto inner = fit_slopes(records, "inner");
        CHECK(std::abs(inner.slope - 2.5) <= 0.05);
        CHECK(inner.r_squared > 0.999);
        const auto outer = fit_slopes(records, "outer");
        CHECK(std::abs(outer.slope - 3.0) <= 0.05);
        CHECK(effective_block_exponent(records) == doctest::Approx(0.5));

        std::vector<BenchRecord> flat;
        for (std::size_t d : {8, 16, 32, 64}) {
            BenchRecord r;
            r.d = d;
            r.phase = "mask";
            r.metric = "mul";
            r.value = 10.0;
            flat.push_back(r);
        }
        const auto constant = fit_slopes(flat, "mask");
        CHECK(constant.slope == doctest::Approx(0.0));
        CHECK(constant.r_squared == 1.0);

        flat.resize(2);
        CHECK_THROWS_AS(fit_slopes(flat, "mask"), InsufficientDataError);
    }

    TEST_CASE("medians collapse repeats")
    {
        std::vector<BenchRecord> records;
        for (std::size_t d : {8, 16, 32}) {
            for (double jitter : {1.0, 100.0, 1.02}) {
                BenchRecord r;
                r.d = d;
                r.phase = "inner";
                r.metric = "seconds";
                r.value = jitter * static_cast<double>(d * d);
                records.push_back(r);
            }
        }
        CHECK(fit_slopes(records, "inner", "seconds").slope == doctest::Approx(2.0));
    }

    TEST_CASE("memory probe")
    {
        CHECK(memory_probe(8, 2) < 1024 * 1024);
        const auto small = static_cast<double>(memory_probe(128, 8));
        const auto large = static_cast<double>(memory_probe(256, 16));
        CHECK(large / small >= 3.5);
        CHECK(large / small <= 4.5);
        const auto narrow = static_cast<double>(memory_probe(128, 1));
        const auto wide = static_cast<double>(memory_probe(128, 64));
        CHECK(std::abs(wide - narrow) / narrow < 0.25);
    }
}
