#pragma once

#include "fpisvi/minpoint.hpp"
#include "fpisvi/svi_model.hpp"

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

namespace fpisvi {

/// Bit flags recorded per iteration whenever a guard had to step in.
enum StepFlag : std::uint32_t {
    FlagNone = 0,
    FlagBClamped = 1u << 0,          ///< solved b below eps_b
    FlagRhoProjected = 1u << 1,      ///< solved |rho| above 1 - eps_rho
    FlagSigmaClamped = 1u << 2,      ///< fixed-point sigma below the floor
    FlagSlopeClamped = 1u << 3,      ///< |v_x - b rho| pulled inside b
    FlagDenominatorClamped = 1u << 4 ///< slope-anchor denominator pushed away from 0
};

/// One iteration: (a, b, rho) solved on the design built from (m, sigma), and
/// the residual norm of that solve.
struct FitStep {
    double a = 0.0;
    double b = 0.0;
    double rho = 0.0;
    double m = 0.0;
    double sigma = 0.0;
    double residual = 0.0;
    std::uint32_t flags = FlagNone;

    SviParams params() const noexcept { return {a, b, rho, m, sigma}; }
};

enum class StopReason { MaxIterations, Tolerance, Stalled };

std::string_view to_string(StopReason reason) noexcept;

struct ClampCounts {
    std::size_t b_clamped = 0;
    std::size_t rho_projected = 0;
    std::size_t sigma_clamped = 0;
    std::size_t slope_clamped = 0;
    std::size_t denominator_clamped = 0;
};

struct FitTrace {
    std::vector<FitStep> steps; ///< steps[n] is iteration n; steps[0] uses the initial (m, sigma)
    StopReason stop_reason = StopReason::MaxIterations;

    std::size_t iterations() const noexcept { return steps.empty() ? 0 : steps.size() - 1; }
    const FitStep& last() const { return steps.back(); }
    ClampCounts clamp_counts() const noexcept;
};

using Anchor = std::variant<MinPoint, SlopeAnchor>;

enum class StopRule {
    IterationsOrTolerance, ///< stop at n >= max_iters or L(n) <= tolerance, plus stall detection
    FixedIterations        ///< always run max_iters iterations
};

struct StartPoint {
    double m = 0.0;
    double sigma = 0.0;
};

struct FpiConfig {
    std::size_t max_iters = 50;
    double tolerance = 1e-3;
    double sigma_floor = 1e-8;
    StopRule stop_rule = StopRule::IterationsOrTolerance;
    std::optional<StartPoint> start; ///< replaces the anchor-derived (m0, sigma0)

    /// The fixed-iteration setting used for the simulation study: max_iters
    /// steps, residual threshold ignored.
    static FpiConfig fixed(std::size_t iters) {
        FpiConfig cfg;
        cfg.max_iters = iters;
        cfg.stop_rule = StopRule::FixedIterations;
        return cfg;
    }
};

/// Successive parameter vectors closer than this for stall_window steps count as a stall.
inline constexpr double stall_threshold = 1e-14;
inline constexpr std::size_t stall_window = 3;

struct StepUpdate {
    double m = 0.0;
    double sigma = 0.0;
    std::uint32_t flags = FlagNone;
};

/// (m, sigma) that puts the curve's minimum at the anchor for the given (a, b, rho).
/// Requires b > 0 and |rho| < 1.
StepUpdate fixed_point_step_min(const MinPoint& anchor, double a, double b, double rho,
                                double sigma_floor = 1e-8);

/// (m, sigma) that makes the curve pass through (x, v) with slope v_x for the
/// given (a, b, rho).
StepUpdate fixed_point_step_slope(const SlopeAnchor& anchor, double a, double b, double rho,
                                  double sigma_floor = 1e-8);

/// Decides whether the iteration stops after the last recorded step.
/// Returns the reason, or nothing to keep going.
std::optional<StopReason> stop_reason(const FitTrace& trace, const FpiConfig& cfg);

/// Convenience predicate over stop_reason.
bool default_stop(const FitTrace& trace, const FpiConfig& cfg);

struct FitResult {
    SviParams params;
    FitTrace trace;
    std::chrono::nanoseconds elapsed{0}; ///< solver loop only
};

/// Alternates the explicit least-squares solve for (a, b rho, b) with the
/// anchor-driven update of (m, sigma). Starts from (m0, sigma0) = (x_min, v_min)
/// for a minimum-point anchor and (x, v) for a slope anchor.
FitResult fpi_fit(const Smile& s, const Anchor& anchor, const FpiConfig& cfg = {});

/// Scores a candidate minimum point by the RASE of a full fit seeded with it.
AnchorScorer fpi_rase_scorer(const Smile& s, FpiConfig cfg = {});

} // namespace fpisvi
