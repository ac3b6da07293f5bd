#include "fpisvi/linear_calibration.hpp"

#include "fpisvi/errors.hpp"

#include <cmath>
#include <limits>

namespace fpisvi {

DesignMatrix build_design(std::span<const double> xs, double m, double sigma) {
    if (!(sigma > 0.0)) throw SviError(ErrorKind::NonPositiveSigma, "sigma must be positive");
    DesignMatrix y{Eigen::MatrixX3d(static_cast<Eigen::Index>(xs.size()), 3)};
    const double s2 = sigma * sigma;
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
        const double d = xs[static_cast<std::size_t>(i)] - m;
        y.columns(i, 0) = 1.0;
        y.columns(i, 1) = d;
        y.columns(i, 2) = std::sqrt(d * d + s2);
    }
    return y;
}

DesignMatrix build_design(const Smile& s, double m, double sigma) {
    const auto xs = s.xs();
    return build_design(xs, m, sigma);
}

LsqSolution lsq_solve(const DesignMatrix& y, const Eigen::VectorXd& v) {
    if (y.rows() != v.size()) throw SviError(ErrorKind::LengthMismatch, "design and data lengths differ");
    if (y.rows() < 3) throw SviError(ErrorKind::TooFewPoints, "least squares needs at least 3 rows");

    const Eigen::Matrix3d gram = y.columns.transpose() * y.columns;
    const Eigen::Vector3d rhs = y.columns.transpose() * v;

    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(gram, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues()(0);
    const double hi = eig.eigenvalues()(2);
    const double condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    if (!(condition <= singular_condition))
        throw SviError(ErrorKind::SingularSystem, "normal matrix condition estimate " + std::to_string(condition));

    LsqSolution out;
    out.condition = condition;
    Eigen::Vector3d beta;
    if (condition <= qr_fallback_condition) {
        beta = gram.fullPivLu().solve(rhs);
    } else {
        beta = y.columns.colPivHouseholderQr().solve(v);
        out.used_qr = true;
    }
    out.beta = Beta::from(beta);
    out.residual_norm = (v - y.columns * beta).norm();
    return out;
}

AbRho beta_to_abr(const Beta& beta) noexcept {
    AbRho out;
    out.a = beta.b1;
    out.b = beta.b3;
    if (!(out.b >= eps_b)) {
        out.b = eps_b;
        out.b_clamped = true;
    }
    out.rho = beta.b2 / out.b;
    constexpr double rho_max = 1.0 - eps_rho;
    if (std::abs(out.rho) > rho_max) {
        out.rho = std::copysign(rho_max, out.rho);
        out.rho_projected = true;
    }
    return out;
}

} // namespace fpisvi
