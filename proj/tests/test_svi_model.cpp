#include "fpisvi/errors.hpp"
#include "fpisvi/fpi_solver.hpp"
#include "fpisvi/svi_model.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace fpisvi;
using fpisvi::testing::case1;
using fpisvi::testing::Gen;

TEST(SviEval, AtShiftEqualsLevelPlusBSigma) {
    EXPECT_DOUBLE_EQ(svi_eval(case1, -0.3), 0.75);
    EXPECT_DOUBLE_EQ(svi_eval({0.0, 1.0, 0.0, 0.0, 1.0}, 0.0), 1.0);
}

TEST(SviEval, LeftEndOfSimulationGrid) {
    // 60-digit reference evaluation
    EXPECT_NEAR(svi_eval(case1, -1.9), 1.7381527307120105, 1e-15);
}

TEST(SviEval, SpanOverloadMatchesScalar) {
    const std::vector<double> xs{-1.0, 0.0, 0.7};
    const auto vs = svi_eval(case1, xs);
    for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_EQ(vs[i], svi_eval(case1, xs[i]));
}

TEST(SviSlope, AtShiftIsBRho) { EXPECT_DOUBLE_EQ(svi_slope(case1, -0.3), -0.25); }

TEST(SviSlope, ApproachesWingSlope) {
    const SviParams p{0.0, 1.0, 0.0, 0.0, 1.0};
    EXPECT_NEAR(svi_slope(p, 1e6), 1.0, 1e-9);
    EXPECT_NEAR(svi_slope(p, -1e6), -1.0, 1e-9);
}

TEST(SviSlope, MatchesCentralDifference) {
    const double h = 1e-6;
    const double fd = (svi_eval(case1, 0.2 + h) - svi_eval(case1, 0.2 - h)) / (2 * h);
    EXPECT_NEAR(svi_slope(case1, 0.2), fd, 1e-6);
}

TEST(SviSlope, PropertyFiniteDifferencesAtRandomPoints) {
    Gen g(11);
    for (int i = 0; i < 100; ++i) {
        const auto p = g.params();
        const double x = g.uniform(-2.0, 2.0);
        const double h = 1e-6;
        const double fd = (svi_eval(p, x + h) - svi_eval(p, x - h)) / (2 * h);
        EXPECT_NEAR(svi_slope(p, x), fd, 1e-6) << "i=" << i;
        EXPECT_GT(svi_slope(p, x), p.b * (p.rho - 1));
        EXPECT_LT(svi_slope(p, x), p.b * (p.rho + 1));
    }
}

TEST(AnalyticMinPoint, ZeroRhoPutsMinimumAtShift) {
    const auto mp = analytic_min_point({0.5, 0.5, 0.0, -0.3, 0.5});
    EXPECT_DOUBLE_EQ(mp.x_min, -0.3);
    EXPECT_DOUBLE_EQ(mp.v_min, 0.75);
    EXPECT_EQ(mp.source, MinPointSource::Analytic);
}

TEST(AnalyticMinPoint, MatchesGridSearch) {
    const auto mp = analytic_min_point(case1);
    // grid search with step 1e-6 over [-0.1, 0.1]
    double best_x = -0.1;
    double best_v = svi_eval(case1, best_x);
    for (int i = 1; i <= 200000; ++i) {
        const double x = -0.1 + i * 1e-6;
        const double v = svi_eval(case1, x);
        if (v < best_v) {
            best_v = v;
            best_x = x;
        }
    }
    EXPECT_NEAR(mp.x_min, best_x, 1e-5);
    EXPECT_NEAR(mp.v_min, best_v, 1e-5);
    EXPECT_NEAR(mp.x_min, -0.011324865405187118, 1e-14);
    EXPECT_NEAR(mp.v_min, 0.71650635094610966, 1e-14);
    EXPECT_NEAR(svi_slope(case1, mp.x_min), 0.0, 1e-12);
}

TEST(AnalyticMinPoint, RejectsDegenerateRho) {
    try {
        analytic_min_point({0.5, 0.5, -1.0, -0.3, 0.5});
        FAIL();
    } catch (const SviError& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DegenerateRho);
    }
    EXPECT_THROW(analytic_min_point({0.5, 0.5, 1.0 - 1e-14, -0.3, 0.5}), SviError);
    EXPECT_THROW(analytic_min_point({0.5, 0.0, 0.0, -0.3, 0.5}), SviError);
}

TEST(AnalyticMinPoint, PropertyFixedPointIdentity) {
    Gen g(3);
    for (int i = 0; i < 200; ++i) {
        const auto p = g.params();
        const auto mp = analytic_min_point(p);
        const auto step = fixed_point_step_min(mp, p.a, p.b, p.rho);
        EXPECT_NEAR(step.m, p.m, 1e-12 * (1 + std::abs(p.m))) << "i=" << i;
        EXPECT_NEAR(step.sigma, p.sigma, 1e-12 * (1 + p.sigma)) << "i=" << i;
    }
}

TEST(AnalyticMinPoint, PropertyCurveStaysAboveMinimum) {
    Gen g(5);
    for (int i = 0; i < 50; ++i) {
        const auto p = g.params();
        const double vmin = analytic_min_point(p).v_min;
        for (int k = 0; k <= 2000; ++k) {
            const double x = -3.0 + 6.0 * k / 2000.0;
            EXPECT_GE(svi_eval(p, x), vmin - 1e-14);
        }
    }
}

TEST(SviEval, PropertyConvexOnGrids) {
    Gen g(7);
    for (int i = 0; i < 50; ++i) {
        const auto p = g.params();
        const auto xs = g.grid(60);
        for (std::size_t k = 1; k + 1 < xs.size(); ++k) {
            // second divided difference on a non-uniform grid
            const double l = (svi_eval(p, xs[k]) - svi_eval(p, xs[k - 1])) / (xs[k] - xs[k - 1]);
            const double r = (svi_eval(p, xs[k + 1]) - svi_eval(p, xs[k])) / (xs[k + 1] - xs[k]);
            EXPECT_GE(r - l, -1e-12);
        }
    }
}

TEST(Smile, RejectsInvalidInput) {
    auto kind_of = [](auto&& f) {
        try {
            f();
        } catch (const SviError& e) {
            return e.kind();
        }
        return ErrorKind::IoError;
    };
    EXPECT_EQ(kind_of([] { Smile({{0, 1}, {1, 2}}); }), ErrorKind::TooFewPoints);
    EXPECT_EQ(kind_of([] { Smile({{0, 1}, {1, -2}, {2, 1}}); }), ErrorKind::InvalidSmile);
    EXPECT_EQ(kind_of([] { Smile({{0, 1}, {1, NAN}, {2, 1}}); }), ErrorKind::InvalidSmile);
    EXPECT_EQ(kind_of([] { Smile({{0, 1}, {0, 2}, {2, 1}}); }), ErrorKind::DuplicateAbscissa);
    EXPECT_EQ(kind_of([] { Smile({{1, 1}, {0, 2}, {2, 1}}); }), ErrorKind::InvalidSmile);
}

TEST(Smile, SortsAndAllowsNegativeUnderAnyPolicy) {
    const auto s = Smile::from_unsorted({{2, 1}, {0, -1}, {1, 0}}, Smile::SignPolicy::Any);
    EXPECT_EQ(s[0].x, 0.0);
    EXPECT_EQ(s[2].x, 2.0);
    EXPECT_EQ(s.vs(), (std::vector<double>{-1, 0, 1}));
}
