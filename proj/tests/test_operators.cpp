#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "szb/operators.hpp"

using namespace szb;

TEST(SzaszDunkl, ReproducesConstants) {
    for (double nu : {0.0, 1.0, 2.5})
        for (double x : {0.0, 0.3, 4.0})
            EXPECT_NEAR(szasz_dunkl(OperatorQuery::make(7, x, nu), functions::constant(1.0)), 1.0, 1e-14);
}

TEST(SzaszDunkl, LinearFunctions) {
    EXPECT_NEAR(szasz_dunkl(OperatorQuery::make(10, 2.0, 0.0), functions::power(1)), 2.0, 1e-13);
    // (r + 2 nu theta_r) / gamma_nu(r) = 1 / gamma_nu(r - 1), so S*_n(s; x) = x for every nu.
    const double v = szasz_dunkl(OperatorQuery::make(10, 1.0, 1.0), functions::power(1));
    const double brute =
        static_cast<double>(oracle::brute_series(10.0, 1.0, [](std::uint64_t r) { return (r + 2.0L * (r % 2)) / 10.0L; }) /
                            oracle::brute_series(10.0, 1.0, [](std::uint64_t) { return 1.0L; }));
    EXPECT_NEAR(v, brute, 1e-14);
    EXPECT_NEAR(v, 1.0, 1e-14);
}

TEST(SzaszBetaDunkl, Examples) {
    EXPECT_NEAR(szasz_beta_dunkl(OperatorQuery::make(6, 1.3, 0.8), functions::constant(1.0)), 1.0, 1e-10);
    for (const auto& g : functions::builtin_corpus())
        if (g.growth_degree + 1 < 9) EXPECT_EQ(szasz_beta_dunkl(OperatorQuery::make(9, 0.0, 0.5), g), g(0.0)) << g.label;
    EXPECT_NEAR(szasz_beta_dunkl(OperatorQuery::make(4, 1.0, 0.0), functions::power(1)), 2.0, 1e-10);
}

TEST(SzaszBetaDunkl, DomainErrors) {
    EXPECT_THROW((void)szasz_beta_dunkl(OperatorQuery::make(1, 1.0, 0.0), functions::constant(1.0)), DomainError);
    EXPECT_THROW((void)szasz_beta_dunkl(OperatorQuery::make(3, 1.0, 0.0), functions::power(2)), MomentDiverges);
    EXPECT_THROW((void)OperatorQuery::make(5, 1.0, -0.2), DomainError);
    EXPECT_THROW((void)szasz_beta_dunkl(OperatorQuery::make(5, -1.0, 0.0), functions::constant(1.0)), DomainError);
    SeriesPolicy tiny;
    tiny.max_terms = 3;
    EXPECT_THROW((void)szasz_beta_dunkl(OperatorQuery::make(8, 10.0, 0.0, tiny), functions::exp_neg()),
                 TermBudgetExceeded);
}

TEST(Monomial, Examples) {
    EXPECT_EQ(szasz_beta_dunkl_monomial(OperatorQuery::make(5, 2.0, 1.0), 0), 1.0);
    EXPECT_NEAR(szasz_beta_dunkl_monomial(OperatorQuery::make(5, 1.0, 0.0), 2), 35.0 / 6.0, 1e-13);
    EXPECT_NEAR(szasz_beta_dunkl_monomial(OperatorQuery::make(4, 1.0, 0.0), 1), 2.0, 1e-14);
    EXPECT_THROW((void)szasz_beta_dunkl_monomial(OperatorQuery::make(3, 1.0, 0.0), 2), MomentDiverges);
    // frozen high-precision values
    EXPECT_NEAR(szasz_beta_dunkl_monomial(OperatorQuery::make(6, 1.3, 1.0), 1), 1.7171232397542382, 1e-13);
    EXPECT_NEAR(szasz_beta_dunkl_monomial(OperatorQuery::make(12, 0.7, 0.8), 4), 2.2752779518241998, 1e-12);
}

TEST(Monomial, QuadraturePathAgreesWithClosedForm) {
    EXPECT_NEAR(szasz_beta_dunkl(OperatorQuery::make(5, 1.0, 0.0), functions::power(2)), 35.0 / 6.0, 1e-8);
    IntegralCache cache;
    for (int n : {6, 13, 40})
        for (double x : {0.1, 1.0, 5.0})
            for (double nu : {0.0, 0.5, 1.0, 2.0})
                for (int m = 0; m <= 4; ++m) {
                    const auto q = OperatorQuery::make(n, x, nu);
                    const double fast = szasz_beta_dunkl_monomial(q, m);
                    const double quad = szasz_beta_dunkl(q, functions::power(m), &cache);
                    EXPECT_LE(std::fabs(fast - quad) / std::fabs(fast), 1e-8) << n << " " << x << " " << nu << " " << m;
                }
}

TEST(Monomial, MatchesBruteForceSeries) {
    for (double nu : {0.0, 0.25, 2.5})
        for (double x : {0.1, 2.0, 10.0})
            for (int m = 1; m <= 4; ++m) {
                const double ref = oracle::brute_monomial(20, x, nu, m);
                EXPECT_NEAR(szasz_beta_dunkl_monomial(OperatorQuery::make(20, x, nu), m), ref, 1e-12 * ref);
            }
}

TEST(Monomial, NuZeroClosedForms) {
    for (int n : {4, 7, 30, 200})
        for (double x : {0.05, 1.0, 7.5, 40.0}) {
            const auto q = OperatorQuery::make(n, x, 0.0);
            const double t1 = n * x / (n - 2.0);
            const double t2 = (n * n * x * x + 2.0 * n * x) / ((n - 2.0) * (n - 3.0));
            EXPECT_LE(std::fabs(szasz_beta_dunkl_monomial(q, 1) / t1 - 1.0), 1e-10);
            EXPECT_LE(std::fabs(szasz_beta_dunkl_monomial(q, 2) / t2 - 1.0), 1e-10);
        }
}

TEST(Operator, PositivityLinearityMonotonicity) {
    const auto g = functions::sqrt_fn(), h = functions::abs_shift(1.0);
    const auto sum = functions::linear_combination(1.0, g, 1.0, h);
    const auto combo = functions::linear_combination(3.0, g, -2.0, h);
    IntegralCache cache;
    for (int n : {6, 15})
        for (double x : {0.2, 1.0, 3.0})
            for (double nu : {0.0, 1.0}) {
                const auto q = OperatorQuery::make(n, x, nu);
                const double tg = szasz_beta_dunkl(q, g, &cache), th = szasz_beta_dunkl(q, h, &cache);
                EXPECT_GE(tg, 0.0);
                EXPECT_GE(th, 0.0);
                EXPECT_LE(tg, szasz_beta_dunkl(q, sum, &cache));  // g <= g + h
                const double tc = szasz_beta_dunkl(q, combo, &cache);
                EXPECT_LE(std::fabs(tc - (3 * tg - 2 * th)), 1e-10 * (3 * tg + 2 * th));
            }
}

TEST(Operator, NormalizationOnGrid) {
    IntegralCache cache;
    const auto one = functions::constant(1.0);
    for (int n : {6, 11, 80})
        for (double x : {0.1, 2.5, 10.0})
            for (double nu : {0.0, 0.5, 2.5})
                EXPECT_LE(std::fabs(szasz_beta_dunkl(OperatorQuery::make(n, x, nu), one, &cache) - 1.0), 1e-10);
}

TEST(IntegralCache, ReusesAcrossX) {
    IntegralCache cache;
    const auto g = functions::exp_neg();
    (void)szasz_beta_dunkl(OperatorQuery::make(10, 1.0, 0.0), g, &cache);
    const auto first = cache.size();
    (void)szasz_beta_dunkl(OperatorQuery::make(10, 1.0, 0.7), g, &cache);
    EXPECT_LE(cache.size(), first + 5);
}
