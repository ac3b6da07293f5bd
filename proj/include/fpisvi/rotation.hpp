#pragma once

#include "fpisvi/fpi_solver.hpp"
#include "fpisvi/svi_model.hpp"

#include <cmath>
#include <numbers>

namespace fpisvi {

inline constexpr double default_theta = std::numbers::pi / 12.0;

struct RotatedPoint {
    double x;
    double v;
};

/// Counter-clockwise rotation about the origin.
inline RotatedPoint rotate(double x, double v, double theta) noexcept {
    const double c = std::cos(theta);
    const double sn = std::sin(theta);
    return {x * c - v * sn, x * sn + v * c};
}

/// Rotates every observation by theta in (0, pi/2) and re-sorts by the new
/// abscissa. Throws NotAFunction if two rotated abscissae coincide within 1e-12.
Smile rotate_points(const Smile& s, double theta);

/// SVI parameters of a rho = -1 curve after rotating it by theta.
struct RotatedParamMap {
    double a_prime = 0.0;
    double b_prime = 0.0;
    double rho_prime = 0.0;
    double m_prime = 0.0;
    double sigma_prime = 0.0;
    double sigma_prime_sq = 0.0;

    SviParams params() const noexcept { return {a_prime, b_prime, rho_prime, m_prime, sigma_prime}; }
};

/// Image of a rho = -1 curve under rotation by theta. The rotated curve's
/// asymptotes have slopes tan(theta) and tan(theta - arctan 2b); its centre is
/// the rotated centre (m, a); sigma'^2 b' = sigma^2 b.
/// Throws InvalidTheta unless 0 < theta < arctan(2b), DomainError unless rho = -1.
RotatedParamMap forward_param_map(const SviParams& p, double theta);

/// The same map as an explicit closed-form system with intermediates a0, m0.
/// Kept for comparison only: its b' and rho' agree with forward_param_map but
/// its a', m' and sigma'^2 do not place the rotated samples on the curve.
struct PrintedRotationMap {
    double a0 = 0.0;
    double m0 = 0.0;
    double a_prime = 0.0;
    double b_prime = 0.0;
    double rho_prime = 0.0;
    double m_prime = 0.0;
    double sigma_prime_sq = 0.0;
};

PrintedRotationMap printed_rotation_map(const SviParams& p, double theta);

/// Original-frame view of a curve fitted in the rotated frame. For a given x it
/// solves x' cos t + v'(x') sin t = x by bracketed bisection, then returns
/// v = -x' sin t + v'(x') cos t (negated abscissa first when mirrored).
class RotatedCurve {
public:
    RotatedCurve(SviParams rotated, double theta, bool mirrored, double x_lo, double x_hi);

    /// Throws BracketFailure if no sign change turns up within 10 range doublings.
    double operator()(double x) const;

    /// Rotated-frame abscissa whose image has original abscissa x.
    double preimage(double x) const;

    const SviParams& rotated_params() const noexcept { return rotated_; }
    double theta() const noexcept { return theta_; }
    bool mirrored() const noexcept { return mirrored_; }

private:
    SviParams rotated_;
    double theta_;
    bool mirrored_;
    double lo_;
    double hi_;
};

enum class MirrorMode { Auto, Never, Always };

struct RotationFit {
    RotatedCurve curve;
    RotatedParamMap rotated;  ///< fitted parameters in the rotated frame
    FitResult fit;            ///< trace of the rotated-frame iteration
    MinPoint anchor;          ///< rotated-frame anchor
    double b_original = 0.0;  ///< wing slope of the fitted curve mapped back
    double rho_original = 0.0;
    bool theta_valid = false; ///< theta < arctan(2 b_original)
};

/// Fits a monotone (rho^2 = 1 like) smile by rotating it, running the
/// minimum-point iteration on the rotated data with a Method II anchor, and
/// returning an original-frame evaluator. rho = +1 smiles are mirrored
/// (x -> -x) first; Auto mirrors when the left end sits lower than the right.
RotationFit fit_via_rotation(const Smile& s, double theta = default_theta, const FpiConfig& cfg = {},
                             MirrorMode mirror = MirrorMode::Auto);

} // namespace fpisvi
