#pragma once

#include "fpisvi/svi_model.hpp"

#include <Eigen/Dense>

#include <span>

namespace fpisvi {

/// Columns (1, x - m, sqrt((x - m)^2 + sigma^2)) evaluated at the smile abscissae.
struct DesignMatrix {
    Eigen::MatrixX3d columns;

    Eigen::Index rows() const noexcept { return columns.rows(); }
    auto ones() const { return columns.col(0); }
    auto shifted() const { return columns.col(1); }
    auto root() const { return columns.col(2); }
};

/// beta = (a, b rho, b)
struct Beta {
    double b1 = 0.0;
    double b2 = 0.0;
    double b3 = 0.0;

    Eigen::Vector3d vec() const { return {b1, b2, b3}; }
    static Beta from(const Eigen::Vector3d& v) { return {v(0), v(1), v(2)}; }
};

DesignMatrix build_design(std::span<const double> xs, double m, double sigma);
DesignMatrix build_design(const Smile& s, double m, double sigma);

struct LsqSolution {
    Beta beta;
    double residual_norm = 0.0;
    double condition = 0.0; ///< condition estimate of Y^T Y
    bool used_qr = false;
};

/// Condition estimate of Y^T Y above which the QR route replaces the normal equations.
inline constexpr double qr_fallback_condition = 1e8;
/// Condition estimate of Y^T Y above which the system counts as singular.
inline constexpr double singular_condition = 1e12;

/// Unconstrained least squares min ||V - Y beta||. Throws SingularSystem.
LsqSolution lsq_solve(const DesignMatrix& y, const Eigen::VectorXd& v);

inline constexpr double eps_b = 1e-10;
inline constexpr double eps_rho = 1e-10;

struct AbRho {
    double a = 0.0;
    double b = 0.0;
    double rho = 0.0;
    bool b_clamped = false;
    bool rho_projected = false;
};

/// (a, b, rho) = (b1, b3, b2 / b3), projected onto b >= eps_b and |rho| <= 1 - eps_rho.
AbRho beta_to_abr(const Beta& beta) noexcept;

} // namespace fpisvi
