#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "szb/special.hpp"

using namespace szb;

TEST(LogBeta, Examples) {
    EXPECT_NEAR(log_beta(1, 1), 0.0, 1e-15);
    EXPECT_NEAR(log_beta(2, 3), std::log(1.0 / 12.0), 1e-14);
    EXPECT_NEAR(log_beta(3, 4), std::log(1.0 / 60.0), 1e-14);
    EXPECT_THROW((void)log_beta(0, 1), DomainError);
    EXPECT_THROW((void)log_beta(1, -2), DomainError);
}

TEST(KernelMomentClosed, Examples) {
    EXPECT_NEAR(kernel_moment_closed({1, 3}, 0), std::log(0.5), 1e-15);
    EXPECT_NEAR(kernel_moment_closed({2, 5}, 1), std::log(1.0 / 30.0), 1e-14);
    EXPECT_THROW((void)kernel_moment_closed({1, 2}, 1), MomentDiverges);
}

TEST(KernelIntegral, MatchesBetaClosedForms) {
    const QuadraturePolicy q;
    EXPECT_NEAR(kernel_integral({3, 6}, functions::constant(1.0), q), 1.0 / 105.0, 1e-8 / 105.0);
    EXPECT_NEAR(kernel_integral({2, 7}, functions::power(2), q), 1.0 / 140.0, 1e-8 / 140.0);
    EXPECT_EQ(kernel_integral({1, 4}, functions::constant(0.0), q), 0.0);
}

TEST(KernelIntegral, AgreesWithDirectSimpsonOnHalfLine) {
    // independent route: Simpson on s in [0, 400] of the raw kernel
    const auto g = functions::exp_neg();
    for (auto [r, n] : {std::pair{1, 3}, {2, 6}, {5, 9}}) {
        auto f = [r = r, n = n](double s) { return std::pow(s, r - 1) * std::pow(1 + s, -n - r + 1) * std::exp(-s); };
        const double ref = oracle::simpson(f, 0.0, 60.0, 200000);
        EXPECT_NEAR(kernel_integral({r, n}, g), ref, 1e-9 * ref) << r << " " << n;
    }
}

TEST(KernelIntegral, GrowthGuards) {
    EXPECT_THROW((void)kernel_integral({2, 3}, functions::power(2)), GrowthTooLarge);
    EXPECT_THROW((void)kernel_integral({0, 3}, functions::constant(1.0)), DomainError);
}

TEST(KernelIntegral, QuadratureAgreesWithLemmaGrid) {
    for (int r = 1; r <= 40; r += 3)
        for (int n = 2; n <= 60; n += 3)
            for (int m = 0; m <= 4; ++m) {
                if (n <= m + 1) continue;
                const double closed = std::exp(kernel_moment_closed({r, n}, m));
                const double quad = kernel_integral({r, n}, functions::power(m));
                EXPECT_LE(std::fabs(quad - closed) / closed, 1e-8) << r << " " << n << " " << m;
            }
}

TEST(KernelIntegral, PositivityAndLinearity) {
    const auto g = functions::sqrt_fn(), h = functions::abs_shift(1.0);
    const auto combo = functions::linear_combination(2.5, g, -0.75, h);
    for (auto [r, n] : {std::pair{1, 4}, {7, 10}, {30, 25}}) {
        const double ig = kernel_integral({r, n}, g), ih = kernel_integral({r, n}, h);
        EXPECT_GE(ig, 0.0);
        EXPECT_GE(ih, 0.0);
        const double ic = kernel_integral({r, n}, combo);
        EXPECT_LE(std::fabs(ic - (2.5 * ig - 0.75 * ih)), 1e-10 * (2.5 * ig + 0.75 * ih));
    }
}

TEST(KernelExpectation, NarrowPeaksAtLargeIndex) {
    // the normalized mass stays 1 where the kernel is a spike near t = 1
    for (auto [r, n] : {std::pair{25000, 256}, {100000, 8}, {3, 400}}) {
        const auto res = kernel_expectation({r, n}, functions::constant(1.0));
        EXPECT_NEAR(res.value, 1.0, 1e-11) << r << " " << n;
        const auto m1 = kernel_expectation({r, n}, functions::power(1));
        EXPECT_NEAR(m1.value, static_cast<double>(r) / (n - 2), 1e-9 * r / (n - 2)) << r << " " << n;
    }
}

TEST(IntegrateAdaptive, NoConvergeIsReported) {
    QuadraturePolicy q;
    q.max_subdivisions = 1;
    q.rel_tol = 1e-15;
    q.abs_tol = 1e-300;
    auto f = [](double t) { return std::sqrt(std::fabs(t - 0.3317)); };
    EXPECT_THROW((void)integrate_adaptive(f, {0.0, 1.0}, q), QuadratureNoConverge);
}

TEST(IntegrateAdaptive, KronrodRuleIsExactOnPolynomials) {
    auto f = [](double t) { return std::pow(t, 20) - 3 * std::pow(t, 7); };
    const auto res = integrate_adaptive(f, {0.0, 1.0}, QuadraturePolicy{});
    EXPECT_NEAR(res.value, 1.0 / 21.0 - 3.0 / 8.0, 1e-15);
}
