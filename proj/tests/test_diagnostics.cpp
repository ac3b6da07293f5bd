#include "fpisvi/diagnostics.hpp"
#include "fpisvi/errors.hpp"
#include "fpisvi/io.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace fpisvi;
using fpisvi::testing::case1;
using fpisvi::testing::Gen;

TEST(Metrics, IdenticalSeriesHaveZeroError) {
    const std::vector<double> v{0.1, 0.2, 0.3};
    const auto m = compute_metrics(v, v);
    EXPECT_EQ(m.rase, 0.0);
    EXPECT_EQ(m.rmse, 0.0);
    EXPECT_EQ(m.n, 3u);
}

TEST(Metrics, SinglePointAndHandArithmetic) {
    const std::vector<double> one{1.0}, one_hat{0.8};
    const auto a = compute_metrics(one, one_hat);
    EXPECT_NEAR(a.rase, 0.2, 1e-15);
    EXPECT_NEAR(a.rmse, 0.2, 1e-15);
    const std::vector<double> v{0.0, 0.0}, v_hat{0.003, -0.004};
    const auto b = compute_metrics(v, v_hat);
    EXPECT_NEAR(b.rase, 0.0035355339059327376, 1e-17);
    EXPECT_NEAR(b.rmse, 0.004, 1e-17);
}

TEST(Metrics, LengthMismatchThrows) {
    const std::vector<double> a{1, 2}, b{1};
    try {
        compute_metrics(a, b);
        FAIL();
    } catch (const SviError& e) {
        EXPECT_EQ(e.kind(), ErrorKind::LengthMismatch);
    }
}

TEST(Metrics, PropertyRaseNeverExceedsRmse) {
    Gen g(61);
    for (int i = 0; i < 500; ++i) {
        const int n = g.integer(1, 40);
        std::vector<double> a, b;
        for (int k = 0; k < n; ++k) {
            a.push_back(g.uniform(-1, 1));
            b.push_back(g.uniform(-1, 1));
        }
        const auto m = compute_metrics(a, b);
        EXPECT_LE(m.rase, m.rmse);
        EXPECT_GE(m.rase, 0.0);
    }
}

TEST(Metrics, SmileOverloadEvaluatesCurve) {
    const auto sim = simulate_case(1);
    EXPECT_EQ(compute_metrics(sim.smile, sim.truth).rase, 0.0);
}

TEST(LipschitzConstants, ZeroRhoSimplifies) {
    const auto c = lemma21_constants(0.5, 0.0, 0.7);
    EXPECT_NEAR(c.L_m, 0.7 / 0.5, 1e-14);
    EXPECT_NEAR(c.L_sigma, (0.5 + 0.7) / 0.25, 1e-14);
    const auto z = lemma21_constants(0.5, 0.0, 0.0);
    EXPECT_EQ(z.L_m, 0.0);
    EXPECT_NEAR(z.L_sigma, 2.0, 1e-15);
}

TEST(LipschitzConstants, ReferenceValues) {
    // 50-digit evaluation of both closed forms
    const auto c = lemma21_constants(0.5, 0.5, 0.716506);
    EXPECT_NEAR(c.L_m, 6.4285, 1e-3);
    EXPECT_NEAR(c.L_m, 6.428487111111111, 1e-12);
    EXPECT_NEAR(c.L_sigma, 6.721933684502311, 1e-12);
}

TEST(LipschitzConstants, DomainChecks) {
    EXPECT_THROW(lemma21_constants(0.0, 0.5, 0.5), SviError);
    EXPECT_THROW(lemma21_constants(0.5, 1.0, 0.5), SviError);
    EXPECT_THROW(lemma21_constants(0.5, -0.1, 0.5), SviError);
    EXPECT_THROW(lemma21_constants(0.5, 0.5, -0.1), SviError);
}

TEST(LipschitzConstants, PropertyIncreasingInLevel) {
    for (double lb : {0.1, 0.5, 2.0})
        for (double lr : {0.0, 0.3, 0.9}) {
            auto prev = lemma21_constants(lb, lr, 0.0);
            for (int k = 1; k <= 50; ++k) {
                const auto c = lemma21_constants(lb, lr, 0.05 * k);
                EXPECT_GE(c.L_m, prev.L_m);
                EXPECT_GT(c.L_sigma, prev.L_sigma);
                prev = c;
            }
        }
}

TEST(BoundVector, ZeroBetaAndZeroConstants) {
    const auto s = simulate_case(1).smile;
    double sum_v = 0.0;
    for (const auto& p : s) sum_v += p.v;
    const LipschitzConstants c{1.5, 2.5};
    const auto l0 = lemma22_L0(s, -0.3, 0.5, {0, 0, 0}, c);
    EXPECT_EQ(l0[0], 0.0);
    EXPECT_NEAR(l0[1], sum_v * 1.5, 1e-12);
    EXPECT_NEAR(l0[2], sum_v * 4.0, 1e-12);

    const auto z = lemma22_L0(s, -0.3, 0.5, {0.5, -0.25, 0.5}, {0.0, 0.0});
    EXPECT_EQ(z[0], 0.0);
    EXPECT_DOUBLE_EQ(z[1], 0.75);
    EXPECT_DOUBLE_EQ(z[2], 0.75);
}

TEST(BoundVector, PositiveOnConvergedCase1) {
    const auto s = simulate_case(1).smile;
    const auto mp = min_point_method_II(s);
    const auto r = fpi_fit(s, mp, FpiConfig::fixed(50));
    const auto& st = r.trace.last();
    const auto l0 = lemma22_L0(s, st.m, st.sigma, {st.a, st.b * st.rho, st.b}, lemma21_constants(st.b, std::abs(st.rho), mp.v_min));
    for (double v : l0) {
        EXPECT_TRUE(std::isfinite(v));
        EXPECT_GT(v, 0.0);
    }
}

TEST(Monotonicity, Classification) {
    const std::vector<double> up{1, 2, 2, 3}, down{3, 2, 1}, flat{1, 1, 1}, mixed{1, 2, 1};
    EXPECT_EQ(classify_monotonicity(up), Monotonicity::Increasing);
    EXPECT_EQ(classify_monotonicity(down), Monotonicity::Decreasing);
    EXPECT_EQ(classify_monotonicity(flat), Monotonicity::Constant);
    EXPECT_EQ(classify_monotonicity(mixed), Monotonicity::Mixed);
}

TEST(Certify, Case1LocatesN0Early) {
    const auto s = simulate_case(1).smile;
    const auto mp = analytic_min_point(case1);
    const auto r = fpi_fit(s, mp, FpiConfig::fixed(50));
    const auto cert = certify(r.trace, s, mp);
    ASSERT_TRUE(cert.n0_found);
    EXPECT_LE(cert.n0, 10u);
    EXPECT_TRUE(cert.constants_defined);
    EXPECT_TRUE(cert.a_nonneg);
    EXPECT_EQ(cert.limit_case, LimitCase::Converged);
    const auto& last = r.trace.last();
    EXPECT_NEAR(last.a, 0.5, 1e-4);
    EXPECT_NEAR(last.b, 0.5, 1e-4);
    EXPECT_NEAR(last.rho, -0.5, 1e-4);
    EXPECT_NEAR(last.m, -0.3, 1e-4);
    EXPECT_NEAR(last.sigma, 0.5, 1e-4);
}

TEST(Certify, ConstantTrajectory) {
    const auto s = simulate_case(1).smile;
    FitTrace t;
    for (int n = 0; n < 6; ++n) t.steps.push_back({0.5, 0.5, -0.5, -0.3, 0.5, 0.0, 0});
    for (double alpha : {0.1, 0.5, 0.9})
        for (double L : {0.1, 0.4}) {
            const auto cert = certify(t, s, analytic_min_point(case1), {alpha, L, 0.01});
            EXPECT_TRUE(cert.n0_found);
            EXPECT_EQ(cert.n0, 1u);
            for (const auto& d : cert.deltas) EXPECT_EQ(d.da + d.db + d.drho, 0.0);
            EXPECT_EQ(cert.limit_case, LimitCase::Converged);
            for (auto m : cert.monotonicity) EXPECT_EQ(m, Monotonicity::Constant);
        }
}

TEST(Certify, VanishingWingSlopeLeavesConstantsUndefined) {
    const auto s = simulate_case(1).smile;
    FitTrace t;
    for (double b : {0.5, 0.2, 0.05, 0.01, 0.002, 0.0}) t.steps.push_back({0.5, b, 0.0, -0.3, 0.5, 0.0, 0});
    const auto cert = certify(t, s, analytic_min_point(case1));
    EXPECT_LE(cert.L_b_lower, 0.0);
    EXPECT_FALSE(cert.constants_defined);
    EXPECT_TRUE(std::isnan(cert.constants.L_m));
    EXPECT_FALSE(cert.sufficient_conditions_hold);
}

TEST(Certify, NeedsTwoSteps) {
    FitTrace t;
    t.steps.push_back({0.5, 0.5, -0.5, -0.3, 0.5, 0.0, 0});
    EXPECT_THROW(certify(t, simulate_case(1).smile, analytic_min_point(case1)), SviError);
}

TEST(Certify, MissingN0IsReported) {
    const auto s = simulate_case(1).smile;
    FitTrace t;
    for (int n = 0; n < 6; ++n) t.steps.push_back({0.5 + 0.1 * (n % 2), 0.5, -0.5, -0.3, 0.5, 0.0, 0});
    const auto cert = certify(t, s, analytic_min_point(case1));
    EXPECT_FALSE(cert.n0_found);
    EXPECT_FALSE(cert.sufficient_conditions_hold);
}
