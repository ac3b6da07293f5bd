#include "fpisvi/diagnostics.hpp"
#include "fpisvi/io.hpp"
#include "fpisvi/linear_calibration.hpp"
#include "fpisvi/qe_baseline.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace fpisvi;
using fpisvi::testing::case1;

TEST(NelderMead, QuadraticBowl) {
    // from m = 0 the default floor gives a 1e-4 by 0.05 simplex, which crawls
    // along m for thousands of steps (scipy behaves identically); start wider
    NmConfig cfg;
    cfg.initial_scale_floor = 0.05;
    const auto r = nelder_mead_2d([](double m, double s) { return (m - 1) * (m - 1) + (s - 2) * (s - 2); }, {0, 1}, cfg);
    EXPECT_NEAR(r.best.m, 1.0, 1e-6);
    EXPECT_NEAR(r.best.sigma, 2.0, 1e-6);
}

TEST(NelderMead, BudgetIsHard) {
    NmConfig cfg;
    for (std::size_t budget : {3, 4, 5, 17, 50, 200}) {
        cfg.max_evals = budget;
        std::size_t calls = 0;
        const auto r = nelder_mead_2d(
            [&](double m, double s) {
                ++calls;
                return std::sin(3 * m) + (s - 1) * (s - 1);
            },
            {0.3, 0.7}, cfg);
        EXPECT_EQ(calls, r.evaluations);
        EXPECT_LE(r.evaluations, budget * (r.restarted ? 2 : 1));
    }
}

TEST(NelderMead, ConstantObjectiveKeepsStart) {
    const auto r = nelder_mead_2d([](double, double) { return 3.0; }, {0.25, 0.75});
    EXPECT_EQ(r.best.m, 0.25);
    EXPECT_EQ(r.best.sigma, 0.75);
}

TEST(NelderMead, NonPositiveSigmaIsPenalised) {
    int calls_with_bad_sigma = 0;
    const auto r = nelder_mead_2d(
        [&](double m, double s) {
            if (s <= 0) ++calls_with_bad_sigma;
            return (m - 0.2) * (m - 0.2) + s;
        },
        {0.0, 1e-3});
    EXPECT_EQ(calls_with_bad_sigma, 0);
    EXPECT_GT(r.best.sigma, 0.0);
    EXPECT_LE(r.evaluations, NmConfig{}.max_evals * (r.restarted ? 2 : 1));
}

TEST(NelderMead, StaysAtZeroResidualStart) {
    const auto s = simulate_case(1).smile;
    const auto xs = s.xs();
    const auto vs = s.vs();
    const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(vs.data(), vs.size());
    const Eigen::Vector3d beta{0.5, -0.25, 0.5};
    const auto r = nelder_mead_2d(
        [&](double m, double sigma) {
            const auto y = build_design(xs, m, sigma);
            return (v - y.columns * beta).squaredNorm();
        },
        {-0.3, 0.5});
    EXPECT_NEAR(r.best.m, -0.3, 1e-8);
    EXPECT_NEAR(r.best.sigma, 0.5, 1e-8);
}

TEST(QeFit, Case1IsWorseThanFpiAfter50Steps) {
    const auto s = simulate_case(1).smile;
    const auto mp = min_point_auto(s);
    const auto qe = qe_fit(s, mp);
    const auto fpi = fpi_fit(s, mp, FpiConfig::fixed(50));
    const double qe_rase = compute_metrics(s, qe.params).rase;
    EXPECT_EQ(qe.trace.iterations(), 50u);
    EXPECT_GE(qe_rase, 1e-3);
    EXPECT_LE(qe_rase, 1e-1);
    EXPECT_LT(compute_metrics(s, fpi.params).rase, qe_rase);
}

TEST(QeFit, ResidualNonIncreasing) {
    for (int id = 1; id <= 4; ++id) {
        const auto s = simulate_case(id).smile;
        const auto r = qe_fit(s, min_point_auto(s));
        for (std::size_t n = 1; n < r.trace.steps.size(); ++n)
            EXPECT_LE(r.trace.steps[n].residual, r.trace.steps[n - 1].residual + 1e-9) << "case " << id << " n " << n;
    }
}

TEST(QeFit, ExactStartIsStationary) {
    const auto s = simulate_case(1).smile;
    const MinPoint start{-0.3, 0.5, MinPointSource::UserSupplied, false};
    QeConfig cfg;
    cfg.max_iters = 5;
    const auto r = qe_fit(s, start, cfg);
    EXPECT_LE(r.trace.steps[0].residual, 1e-12);
    for (const auto& st : r.trace.steps) {
        EXPECT_NEAR(st.m, -0.3, 1e-8);
        EXPECT_NEAR(st.sigma, 0.5, 1e-8);
    }
}

TEST(QeFit, SharesTraceSchemaWithFpi) {
    const auto s = simulate_case(2).smile;
    const auto r = qe_fit(s, min_point_auto(s));
    EXPECT_EQ(r.trace.steps.size(), 51u);
    EXPECT_EQ(r.trace.stop_reason, StopReason::MaxIterations);
    EXPECT_GT(r.elapsed.count(), 0);
}
