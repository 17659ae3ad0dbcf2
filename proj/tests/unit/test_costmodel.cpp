#include "sparsegpt/costmodel.hpp"

#include <doctest.h>

#include <sstream>

using namespace sparsegpt;

namespace {

OmegaCurve refined_curve() { return OmegaCurve::default_curve().with_anchor(0.5275, 2.0575); }

OmegaCurve parse_table(const std::string& text)
{
    std::istringstream in(text);
    return OmegaCurve::from_csv(in);
}

} // namespace

TEST_SUITE("costmodel")
{
    TEST_CASE("evaluate the default curve")
    {
        const auto curve = OmegaCurve::default_curve();
        CHECK(curve.evaluate(0.0) == 2.0);
        CHECK(curve.evaluate(0.2) == 2.0);
        CHECK(curve.evaluate(0.321) == 2.0);
        CHECK(curve.evaluate(1.0) == 2.371);
        CHECK(curve.evaluate(0.6605) == doctest::Approx(2.1855).epsilon(1e-12));
        CHECK(curve.alpha() == 0.321);
        CHECK(curve.omega() == 2.371);
        CHECK_THROWS_AS(curve.evaluate(-0.01), DomainError);
        CHECK_THROWS_AS(curve.evaluate(1.5), DomainError);
    }

    TEST_CASE("cost report examples")
    {
        const auto curve = OmegaCurve::default_curve();
        const auto top = cost_report(curve, 1.0);
        CHECK(top.hessian == 2.371);
        CHECK(top.inner == 3.0);
        CHECK(top.outer == doctest::Approx(2.371).epsilon(1e-15));
        CHECK(top.total == 3.0);

        const auto bottom = cost_report(curve, 0.0);
        CHECK(bottom.inner == 2.0);
        CHECK(bottom.outer == 3.0);
        CHECK(bottom.total == 3.0);

        const auto refined = cost_report(refined_curve(), 0.5275);
        CHECK(refined.inner == doctest::Approx(2.5275));
        CHECK(refined.outer == doctest::Approx(2.53));
        CHECK(refined.total == doctest::Approx(2.53));
    }

    TEST_CASE("total stays within [2, 3]")
    {
        for (const auto& curve : {OmegaCurve::default_curve(), refined_curve(), OmegaCurve::classical()}) {
            for (int k = 0; k <= 100; ++k) {
                const auto r = cost_report(curve, k / 100.0);
                CHECK(r.total >= 2.0);
                CHECK(r.total <= 3.0 + 1e-12);
            }
        }
    }

    TEST_CASE("optimal block exponent")
    {
        // 2 + a = 1 + 2 + s (a - alpha) - a with s = 0.371 / 0.679
        const double s = 0.371 / 0.679;
        const double closed_form = (1.0 - s * 0.321) / (2.0 - s);
        const auto def = optimize_block_exponent(OmegaCurve::default_curve());
        CHECK(def.a == doctest::Approx(closed_form).epsilon(2e-4));
        CHECK(def.total == doctest::Approx(2.0 + closed_form).epsilon(2e-4));
        CHECK(std::abs(def.a - 0.5673) <= 0.005);

        const auto refined = optimize_block_exponent(refined_curve());
        CHECK(std::abs(refined.a - 0.5275) <= 0.005);
        CHECK(std::abs(refined.total - 2.53) <= 0.005);

        const auto classical = optimize_block_exponent(OmegaCurve::classical());
        CHECK(classical.a == 0.0);
        CHECK(classical.total == 3.0);

        CHECK_THROWS_AS(optimize_block_exponent(OmegaCurve::default_curve(), 0.0), DomainError);
        CHECK_THROWS_AS(optimize_block_exponent(OmegaCurve::default_curve(), 0.05), DomainError);
    }

    TEST_CASE("curve validation")
    {
        CHECK_THROWS_AS(OmegaCurve({{0.0, 2.0}}), DomainError);
        CHECK_THROWS_AS(OmegaCurve({{0.1, 2.0}, {1.0, 2.4}}), DomainError);
        CHECK_THROWS_AS(OmegaCurve({{0.0, 2.0}, {0.9, 2.4}}), DomainError);
        CHECK_THROWS_AS(OmegaCurve({{0.0, 2.0}, {0.5, 2.5}, {1.0, 2.4}}), DomainError);
        CHECK_THROWS_AS(OmegaCurve({{0.0, 2.0}, {0.5, 2.1}, {0.5, 2.2}, {1.0, 2.4}}), DomainError);
        CHECK_THROWS_AS(OmegaCurve({{0.0, 2.0}, {1.0, 3.5}}), DomainError);
        CHECK_NOTHROW(OmegaCurve({{0.0, 2.0}, {1.0, 2.0}}));
    }

    TEST_CASE("anchor table CSV")
    {
        const auto curve = parse_table("a,omega\n0,2\n0.321,2\n0.5275,2.0575\n1,2.371\n");
        CHECK(curve.anchors().size() == 4);
        CHECK(curve.evaluate(0.5275) == 2.0575);

        CHECK_THROWS_AS(parse_table(""), FormatError);
        CHECK_THROWS_AS(parse_table("x,y\n0,2\n1,3\n"), FormatError);
        CHECK_THROWS_AS(parse_table("a,omega\n0,2\n1,abc\n"), FormatError);
        CHECK_THROWS_AS(parse_table("a,omega\n0,2,3\n1,3\n"), FormatError);
        CHECK_THROWS_AS(parse_table("a,omega\n0,2\n0.5,3.5\n1,3\n"), FormatError);
        CHECK_THROWS_AS(OmegaCurve::from_csv_file("/nonexistent/omega.csv"), FormatError);
    }

    TEST_CASE("predicted flops examples")
    {
        const auto classical = MatMulBackend::classical();
        const auto full = predicted_flops(8, 8, classical);
        CHECK(full[Phase::Inner].mul == 288);
        CHECK(full[Phase::Outer].mul == 0);
        CHECK(full[Phase::Error] == OpCounts{64, 0, 64, 0});
        CHECK(full[Phase::Finalize] == OpCounts{64, 0, 0, 0});

        const auto two = predicted_flops(8, 2, classical);
        CHECK(two[Phase::Inner].mul == 96);
        CHECK(two[Phase::Outer].mul == 192);
        CHECK(two[Phase::Outer].add == 192);

        const auto four = predicted_flops(8, 4, classical);
        CHECK(four[Phase::Inner].mul == 160);
        CHECK(four[Phase::Outer].mul == 128);

        CHECK(full[Phase::Hessian] == OpCounts{});
        CHECK(full[Phase::Mask] == OpCounts{});
        CHECK_THROWS_AS(predicted_flops(8, 3, classical), ConfigError);
        CHECK_THROWS_AS(predicted_flops(8, 0, classical), ConfigError);
    }

    TEST_CASE("strassen outer counts drop below classical for large blocks")
    {
        for (std::size_t d : {256, 512}) {
            for (std::size_t block : {64, 128}) {
                const auto fast = predicted_flops(d, block, MatMulBackend::strassen(32));
                const auto slow = predicted_flops(d, block, MatMulBackend::classical());
                CHECK(fast[Phase::Outer].mul < slow[Phase::Outer].mul);
                CHECK(fast[Phase::Inner] == slow[Phase::Inner]);
            }
        }
    }
}
