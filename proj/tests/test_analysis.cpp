#include <gtest/gtest.h>

#include <cmath>

#include "szb/analysis.hpp"

using namespace szb;

TEST(Modulus, Examples) {
    EXPECT_NEAR(modulus(functions::power(1), 0.3, 10.0).value, 0.3, 1e-12);
    EXPECT_NEAR(modulus(functions::power(2), 0.1, 5.0).value, 0.1 * (10.0 - 0.1), 1e-12);
    EXPECT_EQ(modulus(functions::constant(2.5), 0.7).value, 0.0);
    const auto m = modulus(functions::power(1), 0.3, 10.0);
    EXPECT_EQ(m.domain_cap, 10.0);
    EXPECT_NEAR(m.grid_step, 0.03, 1e-15);
}

TEST(Modulus, SecondDifferences) {
    const auto affine = functions::linear_combination(3.0, functions::constant(1.0), -2.0, functions::power(1));
    EXPECT_NEAR(second_modulus(affine, 0.5).value, 0.0, 1e-12);
    for (double d : {0.05, 0.3, 1.0}) EXPECT_NEAR(second_modulus(functions::power(2), d).value, 2 * d * d, 1e-9);
    EXPECT_NEAR(second_modulus(functions::abs_shift(1.0), 0.2, 2.0).value, 0.4, 1e-12);
}

TEST(Modulus, Weighted) {
    EXPECT_EQ(weighted_modulus(functions::constant(1.0), 0.5).value, 0.0);
    EXPECT_NEAR(weighted_modulus(functions::power(1), 1.0, 50.0).value, 0.5, 1e-12);
    // dense-grid oracle against the analytic sup 1.6 / (sqrt(17) - 1)
    const double exact = 1.6 / (std::sqrt(17.0) - 1.0);
    const auto dense = weighted_modulus(functions::power(2), 0.5, 20.0, 1e-3);
    EXPECT_NEAR(dense.value, exact, 1e-6);
    EXPECT_LE(dense.value, exact + 1e-15);
    EXPECT_LE(weighted_modulus(functions::power(2), 0.5, 20.0).value, dense.value + 1e-15);
}

TEST(Modulus, MonotoneInDeltaAndRefinement) {
    for (const auto& g : {functions::sqrt_fn(), functions::exp_neg(), functions::saturating_square()}) {
        double prev = 0, prev2 = 0, prevw = 0;
        for (double d : {0.05, 0.1, 0.2, 0.4, 0.8}) {
            const double w = modulus(g, d).value, w2 = second_modulus(g, d).value, ww = weighted_modulus(g, d).value;
            EXPECT_GE(w, prev - 1e-15) << g.label;
            EXPECT_GE(w2, prev2 - 1e-15) << g.label;
            EXPECT_GE(ww, prevw - 1e-15) << g.label;
            prev = w, prev2 = w2, prevw = ww;
        }
        EXPECT_GE(modulus(g, 0.2, 20.0, 0.005).value, modulus(g, 0.2, 20.0, 0.02).value - 1e-15);
    }
}

TEST(Modulus, LipschitzDefinition) {
    for (const auto& g : functions::builtin_corpus()) {
        if (!g.lipschitz) continue;
        for (double d : {0.01, 0.1, 0.5, 2.0})
            EXPECT_LE(modulus(g, d).value, g.lipschitz->M * std::pow(d, g.lipschitz->alpha) * (1 + 1e-12)) << g.label;
    }
    EXPECT_NEAR(modulus(functions::sqrt_fn(), 0.25).value, 0.5, 1e-12);
}

TEST(Modulus, PreconditionsEnforced) {
    EXPECT_THROW((void)modulus(functions::power(1), 0.0), DomainError);
    EXPECT_THROW((void)modulus(functions::power(1), 1.0, 0.5), DomainError);
    EXPECT_THROW((void)modulus(functions::power(1), 1.0, 10.0, 0.2), DomainError);
}

TEST(EmpiricalOrder, RecoversPowerLaw) {
    std::vector<int> ns{5, 10, 25, 50, 100, 200};
    std::vector<double> e;
    for (int n : ns) e.push_back(3.0 / std::pow(n, 1.5) * (n < 20 ? 7.0 : 1.0));
    EXPECT_NEAR(empirical_order(ns, e), 1.5, 1e-12);  // the two distorted points are dropped
}

TEST(Korovkin, ClosedFormsAtNuZero) {
    const std::vector<int> ns{25, 50, 100, 200, 400};
    const auto e0 = check_korovkin(0, ns, 0.3);
    EXPECT_TRUE(e0.pass);
    for (double v : e0.lhs) EXPECT_LE(v, 1e-10);

    const auto e1 = check_korovkin(1, ns, 0.0);
    for (std::size_t k = 0; k < ns.size(); ++k) EXPECT_NEAR(e1.lhs[k], 10.0 / (ns[k] - 2), 1e-12);
    EXPECT_NEAR(e1.empirical_order, 1.0, 0.02);
}

TEST(Korovkin, SecondMomentHalvesWithN) {
    const auto e2 = check_korovkin(2, {100, 200}, 0.5);
    EXPECT_NEAR(e2.lhs[0] / e2.lhs[1], 2.0, 0.05);
    // exact error at nu = 0, x = 5 is 25(5n-6)/((n-2)(n-3)) + 10n/((n-2)(n-3))
    const auto z = check_korovkin(2, {400}, 0.0);
    EXPECT_NEAR(z.lhs[0], (25.0 * 1994 + 4000) / (398.0 * 397.0), 1e-10);
}

TEST(WeightedConvergence, ExplicitMajorants) {
    RateOptions ro;
    ro.weighted_points = 25;
    const auto one = check_weighted_convergence(functions::constant(1.0), {8, 16}, 1.0, ro);
    EXPECT_TRUE(one.pass);
    for (double v : one.lhs) EXPECT_LE(v, 1e-10);

    const auto s = check_weighted_convergence(functions::power(1), {10}, 1.0, ro);
    EXPECT_TRUE(s.pass);
    EXPECT_NEAR(s.rhs[0], 0.5, 1e-15);
    EXPECT_LE(s.lhs[0], 0.5);

    const auto s2 = check_weighted_convergence(functions::power(2), {8, 16, 32, 64}, 0.0, ro);
    EXPECT_TRUE(s2.pass);
    EXPECT_NEAR(s2.rhs[0], (5.0 * 8 - 6 + 8) / (64.0 - 40 + 6), 1e-14);
}

TEST(WeightedConvergence, BoundedSampleDecreases) {
    RateOptions ro;
    ro.weighted_points = 20;
    const auto r = check_weighted_convergence(functions::saturating_square(), {8, 32, 128}, 0.5, ro);
    EXPECT_TRUE(r.pass);
    EXPECT_LT(r.lhs[2], r.lhs[0]);
}

TEST(LipschitzRate, Examples) {
    const auto s = check_lipschitz_rate(functions::power(1), {5}, {1.0}, 0.0);
    ASSERT_EQ(s.points.size(), 1u);
    EXPECT_NEAR(s.points[0].lhs, 2.0 / 3.0, 1e-13);
    EXPECT_NEAR(s.points[0].rhs, std::sqrt(3.5), 1e-12);
    EXPECT_TRUE(s.pass);

    const auto c = check_lipschitz_rate(functions::constant(1.0), {6, 20}, {0.5, 3.0}, 1.0);
    EXPECT_TRUE(c.pass);

    const auto r = check_lipschitz_rate(functions::sqrt_fn(), {12}, {2.0}, 0.5);
    EXPECT_TRUE(r.pass);
    EXPECT_GT(r.points[0].rhs - r.points[0].lhs, 0.0);
}

TEST(ModulusRate, Examples) {
    const auto s = check_modulus_rate(functions::power(1), {9}, {1.0}, 0.0);
    ASSERT_EQ(s.points.size(), 1u);
    EXPECT_NEAR(s.points[0].lhs, 2.0 / 7.0, 1e-13);
    EXPECT_NEAR(s.points[0].rhs, (1 + std::sqrt(9 + 18.0 / 7.0)) / 3.0, 1e-12);
    EXPECT_TRUE(s.pass);

    EXPECT_TRUE(check_modulus_rate(functions::constant(1.0), {8}, {1.0}, 0.5).pass);
    const auto sat = check_modulus_rate(functions::saturating_square(), {16, 50, 100, 400}, {0.5, 1.0, 3.0}, 1.0);
    EXPECT_TRUE(sat.pass);
    EXPECT_EQ(sat.violations, 0u);
}

TEST(KFunctional, Lemma8AndFit) {
    const auto r = check_k_functional_rate(functions::exp_neg(), {10}, {1.0}, 0.0);
    EXPECT_TRUE(r.lemma8.pass);
    ASSERT_EQ(r.lemma8.points.size(), 1u);
    EXPECT_GT(r.lemma8.points[0].lhs, 0.0);
    EXPECT_TRUE(r.theorem9.fitted_constant.has_value());
    EXPECT_TRUE(std::isfinite(*r.theorem9.fitted_constant));

    const auto c = check_k_functional_rate(functions::constant(2.0), {8, 16}, {0.1, 1.0}, 2.5);
    EXPECT_TRUE(c.lemma8.pass);
    EXPECT_LT(*c.theorem9.fitted_constant, 1e-12);
}

TEST(KFunctional, SignedChiIsOnlyDiagnostic) {
    // signed Psi_1 < 0 here, so the signed chi_n bound fails even for g = 1
    const auto c = check_k_functional_rate(functions::constant(1.0), {10}, {0.1}, 2.5);
    EXPECT_TRUE(c.lemma8.pass);
    EXPECT_EQ(c.lemma8.diagnostic_violations, 1u);
}

TEST(KFunctional, FitStableUnderExtension) {
    const std::vector<double> xs{0.5, 1.0, 2.0};
    const auto a = check_k_functional_rate(functions::exp_neg(), {8, 16, 32, 64, 128}, xs, 0.5).theorem9;
    const auto b = check_k_functional_rate(functions::exp_neg(), {8, 16, 32, 64, 128, 256}, xs, 0.5).theorem9;
    EXPECT_LT(constant_drift(a, b), 0.2);
    EXPECT_EQ(a.per_x_constant.size(), xs.size());
}

TEST(WeightedModulusRate, Examples) {
    RateOptions ro;
    ro.weighted_points = 20;
    const auto one = check_weighted_modulus_rate(functions::constant(1.0), {8, 16}, 0.0, ro);
    EXPECT_EQ(*one.fitted_constant, 0.0);
    EXPECT_TRUE(one.pass);

    const auto s2 = check_weighted_modulus_rate(functions::power(2), {4, 8, 16, 32, 64, 128, 256}, 0.0, ro);
    EXPECT_EQ(s2.skipped, 1u);
    EXPECT_TRUE(s2.pass);
    EXPECT_NEAR(s2.empirical_order, 1.0, 0.15);

    const auto a = check_weighted_modulus_rate(functions::square_over_linear(), {8, 16, 32, 64, 128}, 1.0, ro);
    const auto b = check_weighted_modulus_rate(functions::square_over_linear(), {8, 16, 32, 64, 128, 256}, 1.0, ro);
    EXPECT_TRUE(b.pass);
    EXPECT_LT(constant_drift(a, b), 0.2);
}
