#pragma once

#include "fpisvi/fpi_solver.hpp"
#include "fpisvi/linear_calibration.hpp"
#include "fpisvi/svi_model.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace fpisvi {

/// RASE is the root mean squared error, RMSE here is the root of the *maximum*
/// squared error, i.e. the largest absolute deviation.
struct ErrorMetrics {
    double rase = 0.0;
    double rmse = 0.0;
    std::size_t n = 0;
};

ErrorMetrics compute_metrics(std::span<const double> observed, std::span<const double> fitted);

/// Metrics of the curve p at the smile abscissae.
ErrorMetrics compute_metrics(const Smile& s, const SviParams& p);

struct LipschitzConstants {
    double L_m = 0.0;
    double L_sigma = 0.0;
};

/// Bounds |m_{n+1} - m_n| <= L_m delta and |sigma_{n+1} - sigma_n| <= L_sigma delta
/// given b_n >= L_b, |rho_n| < L_rho and parameter steps below delta.
/// Throws DomainError unless L_b > 0, 0 <= L_rho < 1 and v_min >= 0.
LipschitzConstants lemma21_constants(double L_b, double L_rho, double v_min);

/// The three-component bound vector L0 at one iterate.
std::array<double, 3> lemma22_L0(const Smile& s, double m, double sigma, const Beta& beta,
                                 const LipschitzConstants& c);

enum class Monotonicity { Constant, Increasing, Decreasing, Mixed };

std::string_view to_string(Monotonicity m) noexcept;

/// Classifies a sequence, treating steps within tol * (1 + |value|) as flat.
Monotonicity classify_monotonicity(std::span<const double> seq, double tol = 1e-13);

struct StepDelta {
    double da = 0.0;
    double db = 0.0;
    double drho = 0.0;
};

struct TailBound {
    std::size_t step = 0;
    std::array<double, 3> L0{};
    std::array<double, 3> scaled{}; ///< |[Y^T Y]^{-1} L0| componentwise
};

/// Which branch of the monotone-limit result the tail falls in, if any.
enum class LimitCase { None, IncreasingAB, DecreasingAB, Converged };

std::string_view to_string(LimitCase c) noexcept;

struct CertifyOptions {
    double alpha = 0.5;
    double L = 0.4;
    double delta = 0.01;
};

/// Numerical check of the sufficient conditions for convergence along a
/// recorded trajectory. Nothing here proves convergence; when a condition
/// fails the corresponding flag is simply false.
struct ConvergenceCertificate {
    CertifyOptions options;

    // first step whose (a, b, rho) moves are all below delta
    bool n0_found = false;
    std::size_t n0 = 0;
    std::vector<StepDelta> deltas; ///< deltas[n] compares step n with n - 1; deltas[0] is zero

    // bounds over the tail n >= n0
    double L_b_lower = 0.0;
    double L_rho_upper = 0.0;
    bool a_nonneg = false;
    bool constants_defined = false; ///< L_b_lower > 0 and L_rho_upper < 1
    LipschitzConstants constants;

    // scaled bound vector against (1 - alpha) L
    std::vector<TailBound> tail_bounds;
    std::array<double, 3> sup_scaled{};
    bool cond_iii_prime_holds = false;
    bool two_L_below_L_b = false;
    double contraction = 0.0; ///< max(L, 2L / L_b)

    /// n0 found, tail bounds usable with a >= 0, scaled bounds below (1 - alpha) L and 2L < L_b.
    bool sufficient_conditions_hold = false;

    std::array<Monotonicity, 5> monotonicity{}; ///< tails of a, b, rho, m, sigma
    LimitCase limit_case = LimitCase::None;
};

ConvergenceCertificate certify(const FitTrace& trace, const Smile& s, const Anchor& anchor,
                               const CertifyOptions& opts = {});

} // namespace fpisvi
