#include "fpisvi/errors.hpp"
#include "fpisvi/io.hpp"
#include "fpisvi/linear_calibration.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace fpisvi;
using fpisvi::testing::case1;
using fpisvi::testing::Gen;

namespace {

Eigen::VectorXd to_vec(const std::vector<double>& v) { return Eigen::Map<const Eigen::VectorXd>(v.data(), v.size()); }

} // namespace

TEST(BuildDesign, DirectSubstitution) {
    const std::vector<double> xs{0, 1, 2};
    const auto y = build_design(xs, 0.0, 1.0);
    EXPECT_EQ(y.rows(), 3);
    EXPECT_EQ(y.ones()(2), 1.0);
    EXPECT_EQ(y.shifted()(2), 2.0);
    EXPECT_DOUBLE_EQ(y.root()(1), std::sqrt(2.0));
    EXPECT_DOUBLE_EQ(y.root()(2), std::sqrt(5.0));
    const auto y1 = build_design(xs, 1.0, 1.0);
    for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(y1.shifted()(i), y.shifted()(i) - 1.0);
}

TEST(BuildDesign, SimulationGridAtTrueShift) {
    const auto y = build_design(simulate_case(1).smile, -0.3, 0.5);
    EXPECT_NEAR(y.root()(0), 1.676305461424021, 1e-14);
    EXPECT_EQ(y.rows(), 39);
}

TEST(BuildDesign, RejectsNonPositiveSigma) {
    const std::vector<double> xs{0, 1, 2};
    EXPECT_THROW(build_design(xs, 0.0, 0.0), SviError);
    EXPECT_THROW(build_design(xs, 0.0, -1.0), SviError);
}

TEST(LsqSolve, ConstantDataIsExact) {
    const std::vector<double> xs{-1, 0, 0.5, 2};
    const auto sol = lsq_solve(build_design(xs, 0.1, 0.3), Eigen::VectorXd::Constant(4, 0.7));
    EXPECT_NEAR(sol.beta.b1, 0.7, 1e-12);
    EXPECT_NEAR(sol.beta.b2, 0.0, 1e-12);
    EXPECT_NEAR(sol.beta.b3, 0.0, 1e-12);
    EXPECT_NEAR(sol.residual_norm, 0.0, 1e-12);
}

TEST(LsqSolve, ThreePointsInterpolate) {
    const std::vector<double> xs{-1, 0.2, 1.5};
    const auto sol = lsq_solve(build_design(xs, 0.0, 0.4), to_vec({0.3, 0.9, 0.1}));
    EXPECT_LT(sol.residual_norm, 1e-12);
}

TEST(LsqSolve, RecoversTrueBetaOnExactData) {
    const auto s = simulate_case(1).smile;
    const auto sol = lsq_solve(build_design(s, -0.3, 0.5), to_vec(s.vs()));
    EXPECT_NEAR(sol.beta.b1, 0.5, 1e-9);
    EXPECT_NEAR(sol.beta.b2, -0.25, 1e-9);
    EXPECT_NEAR(sol.beta.b3, 0.5, 1e-9);
    EXPECT_LE(sol.residual_norm, 1e-10);
}

TEST(LsqSolve, SingularDesignThrows) {
    // sigma tiny and every x on the same side of m: X3 = |x - m| = x - m is collinear with X1, X2
    const std::vector<double> xs{1, 2, 3, 4};
    try {
        lsq_solve(build_design(xs, 0.0, 1e-12), to_vec({1, 2, 3, 5}));
        FAIL();
    } catch (const SviError& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SingularSystem);
    }
}

TEST(LsqSolve, PropertyLocalOptimalityAndNormalEquations) {
    Gen g(41);
    for (int i = 0; i < 100; ++i) {
        const auto xs = g.grid(20);
        std::vector<double> vs;
        for (double x : xs) vs.push_back(g.uniform(0.0, 1.0));
        const auto y = build_design(xs, g.uniform(-1, 1), g.uniform(0.05, 1.0));
        const auto v = to_vec(vs);
        const auto sol = lsq_solve(y, v);
        const Eigen::Vector3d beta = sol.beta.vec();
        EXPECT_NEAR((v - y.columns * beta).norm(), sol.residual_norm, 1e-12);
        const Eigen::Vector3d normal = y.columns.transpose() * (v - y.columns * beta);
        EXPECT_LE(normal.norm(), 1e-8 * (1 + (y.columns.transpose() * v).norm())) << "i=" << i;
        for (int k = 0; k < 3; ++k)
            for (double d : {-1e-4, 1e-4}) {
                Eigen::Vector3d moved = beta;
                moved(k) += d;
                EXPECT_GE((v - y.columns * moved).norm(), sol.residual_norm);
            }
    }
}

TEST(LsqSolve, PropertyScaleEquivariance) {
    Gen g(43);
    for (int i = 0; i < 50; ++i) {
        const auto xs = g.grid(12);
        std::vector<double> vs;
        for (double x : xs) vs.push_back(g.uniform(0.0, 1.0));
        const auto y = build_design(xs, g.uniform(-1, 1), g.uniform(0.05, 1.0));
        const double lambda = g.uniform(0.1, 10.0);
        const auto a = lsq_solve(y, to_vec(vs));
        const auto b = lsq_solve(y, lambda * to_vec(vs));
        EXPECT_NEAR(b.beta.b1, lambda * a.beta.b1, 1e-8 * (1 + std::abs(b.beta.b1)));
        EXPECT_NEAR(b.beta.b2, lambda * a.beta.b2, 1e-8 * (1 + std::abs(b.beta.b2)));
        EXPECT_NEAR(b.beta.b3, lambda * a.beta.b3, 1e-8 * (1 + std::abs(b.beta.b3)));
        EXPECT_NEAR(b.residual_norm, lambda * a.residual_norm, 1e-10 * (1 + b.residual_norm));
    }
}

TEST(LsqSolve, PropertyRecoversBetaFromExactCurves) {
    Gen g(47);
    for (int i = 0; i < 100; ++i) {
        const auto p = g.params();
        const auto s = fpisvi::testing::sample_on(p, g.grid(25));
        const auto sol = lsq_solve(build_design(s, p.m, p.sigma), to_vec(s.vs()));
        EXPECT_NEAR(sol.beta.b1, p.a, 1e-9);
        EXPECT_NEAR(sol.beta.b2, p.b * p.rho, 1e-9);
        EXPECT_NEAR(sol.beta.b3, p.b, 1e-9);
    }
}

TEST(BetaToAbr, DivisionAndProjection) {
    auto r = beta_to_abr({0.5, -0.25, 0.5});
    EXPECT_EQ(r.a, 0.5);
    EXPECT_EQ(r.b, 0.5);
    EXPECT_EQ(r.rho, -0.5);
    EXPECT_FALSE(r.b_clamped || r.rho_projected);

    r = beta_to_abr({0.1, 0.9, 0.5});
    EXPECT_EQ(r.rho, 1.0 - eps_rho);
    EXPECT_TRUE(r.rho_projected);

    r = beta_to_abr({0.1, 0.0, 1e-15});
    EXPECT_EQ(r.b, eps_b);
    EXPECT_EQ(r.rho, 0.0);
    EXPECT_TRUE(r.b_clamped);
}
