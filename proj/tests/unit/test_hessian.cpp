#include "oracles.hpp"

#include "sparsegpt/hessian.hpp"
#include "sparsegpt/rational.hpp"

#include <doctest.h>

using namespace sparsegpt;

TEST_SUITE("hessian")
{
    TEST_CASE("zero calibration gives 1/lambda I")
    {
        const auto h = build_inverse_hessian(DenseMatrix(3, 3), 2.0);
        CHECK(h.h == DenseMatrix::from_rows({{0.5, 0, 0}, {0, 0.5, 0}, {0, 0, 0.5}}));
        CHECK(h.lambda == 2.0);
        CHECK(h.diag_min == 0.5);
    }

    TEST_CASE("identity calibration")
    {
        const auto h = build_inverse_hessian(DenseMatrix::identity(2), 1.0);
        CHECK(h.h == DenseMatrix::from_rows({{0.5, 0}, {0, 0.5}}));
    }

    TEST_CASE("integer calibration matches the exact inverse")
    {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const auto x = oracle::random_integer_matrix(4, 4, seed, -4, 4);
            const auto rx = RationalMatrix::from_dense(x);
            RationalMatrix gram = rx * rx.transposed();
            for (std::size_t i = 0; i < 4; ++i) {
                gram(i, i) += 1;
            }
            const auto exact = rational_inverse(gram);
            const auto h = build_inverse_hessian(x, 1.0);
            CHECK(max_abs_error(exact, h.h) <= 1e-12);
        }
    }

    TEST_CASE("rectangular calibration d x N")
    {
        const auto x = oracle::random_matrix(5, 12, 3);
        const auto h = build_inverse_hessian(x, 0.1);
        CHECK(h.dim() == 5);
        CHECK(h.diag_min > 0.0);
    }

    TEST_CASE("automatic lambda is 1% of the mean Gram diagonal")
    {
        const auto x = DenseMatrix::from_rows({{1, 1}, {2, 0}});
        // diag(X X^T) = (2, 4), mean 3
        const auto h = build_inverse_hessian(x, std::nullopt);
        CHECK(h.lambda == doctest::Approx(0.03).epsilon(1e-15));
        CHECK_THROWS_AS(build_inverse_hessian(DenseMatrix(3, 3), std::nullopt), DegenerateCalibrationError);
    }

    TEST_CASE("argument validation")
    {
        CHECK_THROWS_AS(build_inverse_hessian(DenseMatrix(3, 3), 0.0), DomainError);
        CHECK_THROWS_AS(build_inverse_hessian(DenseMatrix(3, 3), -1.0), DomainError);
        CHECK_THROWS_AS(build_inverse_hessian(DenseMatrix(3, 0), 1.0), ShapeError);
    }

    TEST_CASE("residual and positive diagonal on random inputs")
    {
        for (std::size_t d : {1, 8, 64, 256}) {
            const auto x = oracle::random_matrix(d, d, d + 1);
            const double lambda = 0.5;
            const auto h = build_inverse_hessian(x, lambda);
            CHECK(h.diag_min > 0.0);
            DenseMatrix shifted(d, d);
            const auto gram = oracle::triple_loop(x, transposed(x));
            for (std::size_t i = 0; i < d; ++i) {
                for (std::size_t j = 0; j < d; ++j) {
                    shifted(i, j) = gram[i][j] + (i == j ? lambda : 0.0);
                }
            }
            CHECK(oracle::residual_vs_identity(shifted, h.h) <= 1e-8);
        }
    }

    TEST_CASE("hessian ledger = Gram d^2 N + inversion")
    {
        const std::size_t d = 12;
        const std::size_t n = 20;
        const auto x = oracle::random_matrix(d, n, 5);
        OpCounts counts;
        const auto h = build_inverse_hessian(x, 1.0, &counts);
        OpCounts inversion;
        spd_inverse(oracle::random_spd(d, 1), &inversion);
        CHECK(counts.mul == d * d * n + inversion.mul);
        CHECK(counts.add == d * d * (n - 1) + d + inversion.add);
        CHECK(counts.div == inversion.div);
    }
}
