#include "fpisvi/fpi_solver.hpp"

#include "fpisvi/diagnostics.hpp"
#include "fpisvi/errors.hpp"
#include "fpisvi/linear_calibration.hpp"

#include <algorithm>
#include <cmath>
#include <type_traits>

namespace fpisvi {

std::string_view to_string(StopReason reason) noexcept {
    switch (reason) {
    case StopReason::MaxIterations: return "max-iterations";
    case StopReason::Tolerance: return "tolerance";
    case StopReason::Stalled: return "stalled";
    }
    return "unknown";
}

ClampCounts FitTrace::clamp_counts() const noexcept {
    ClampCounts c;
    for (const auto& s : steps) {
        c.b_clamped += (s.flags & FlagBClamped) ? 1 : 0;
        c.rho_projected += (s.flags & FlagRhoProjected) ? 1 : 0;
        c.sigma_clamped += (s.flags & FlagSigmaClamped) ? 1 : 0;
        c.slope_clamped += (s.flags & FlagSlopeClamped) ? 1 : 0;
        c.denominator_clamped += (s.flags & FlagDenominatorClamped) ? 1 : 0;
    }
    return c;
}

StepUpdate fixed_point_step_min(const MinPoint& anchor, double a, double b, double rho, double sigma_floor) {
    const double gap = 1.0 - rho * rho;
    const double excess = anchor.v_min - a;
    StepUpdate out;
    out.m = anchor.x_min + rho * excess / (b * gap);
    out.sigma = excess / (b * std::sqrt(gap));
    if (!(out.sigma >= sigma_floor)) {
        out.sigma = sigma_floor;
        out.flags |= FlagSigmaClamped;
    }
    return out;
}

StepUpdate fixed_point_step_slope(const SlopeAnchor& anchor, double a, double b, double rho,
                                  double sigma_floor) {
    constexpr double slope_margin = 1e-10;
    constexpr double denominator_floor = 1e-12;

    StepUpdate out;
    double offset = anchor.v_x - b * rho; // lies in (-b, b) for data on the curve
    const double limit = b * (1.0 - slope_margin);
    if (std::abs(offset) > limit) {
        offset = std::copysign(limit, offset);
        out.flags |= FlagSlopeClamped;
    }
    const double slope = offset + b * rho;
    double denom = b * rho * slope + b * b * (1.0 - rho * rho);
    if (std::abs(denom) < denominator_floor) {
        denom = denom < 0.0 ? -denominator_floor : denominator_floor;
        out.flags |= FlagDenominatorClamped;
    }
    const double excess = anchor.v - a;
    out.m = anchor.x - excess * offset / denom;
    out.sigma = excess * std::sqrt(b * b - offset * offset) / denom;
    if (!(out.sigma >= sigma_floor)) {
        out.sigma = sigma_floor;
        out.flags |= FlagSigmaClamped;
    }
    return out;
}

std::optional<StopReason> stop_reason(const FitTrace& trace, const FpiConfig& cfg) {
    if (trace.steps.empty()) return std::nullopt;
    const std::size_t n = trace.steps.size() - 1;
    if (n >= cfg.max_iters) return StopReason::MaxIterations;
    if (cfg.stop_rule == StopRule::FixedIterations) return std::nullopt;
    if (trace.steps[n].residual <= cfg.tolerance) return StopReason::Tolerance;
    if (n >= stall_window) {
        bool stalled = true;
        for (std::size_t k = 0; k < stall_window && stalled; ++k) {
            const auto& cur = trace.steps[n - k];
            const auto& prev = trace.steps[n - k - 1];
            const double move = std::max({std::abs(cur.a - prev.a), std::abs(cur.b - prev.b),
                                          std::abs(cur.rho - prev.rho), std::abs(cur.m - prev.m),
                                          std::abs(cur.sigma - prev.sigma)});
            stalled = move < stall_threshold;
        }
        if (stalled) return StopReason::Stalled;
    }
    return std::nullopt;
}

bool default_stop(const FitTrace& trace, const FpiConfig& cfg) { return stop_reason(trace, cfg).has_value(); }

FitResult fpi_fit(const Smile& s, const Anchor& anchor, const FpiConfig& cfg) {
    const auto xs = s.xs();
    const auto vs = s.vs();
    const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(vs.data(), static_cast<Eigen::Index>(vs.size()));

    double m = 0.0;
    double sigma = 0.0;
    std::visit(
        [&](const auto& an) {
            using T = std::decay_t<decltype(an)>;
            if constexpr (std::is_same_v<T, MinPoint>) {
                m = an.x_min;
                sigma = an.v_min;
            } else {
                m = an.x;
                sigma = an.v;
            }
        },
        anchor);
    if (cfg.start) {
        m = cfg.start->m;
        sigma = cfg.start->sigma;
    }
    if (!std::isfinite(m) || !std::isfinite(sigma))
        throw SviError(ErrorKind::DomainError, "anchor must be finite");

    std::uint32_t carried = FlagNone;
    if (!(sigma >= cfg.sigma_floor)) {
        sigma = cfg.sigma_floor;
        carried |= FlagSigmaClamped;
    }

    FitResult result;
    result.trace.steps.reserve(cfg.max_iters + 1);
    const auto started = std::chrono::steady_clock::now();
    for (;;) {
        const auto sol = lsq_solve(build_design(xs, m, sigma), v);
        const auto abr = beta_to_abr(sol.beta);
        FitStep step{abr.a, abr.b, abr.rho, m, sigma, sol.residual_norm, carried};
        if (abr.b_clamped) step.flags |= FlagBClamped;
        if (abr.rho_projected) step.flags |= FlagRhoProjected;
        result.trace.steps.push_back(step);

        if (const auto reason = stop_reason(result.trace, cfg)) {
            result.trace.stop_reason = *reason;
            break;
        }

        const StepUpdate next = std::visit(
            [&](const auto& an) {
                using T = std::decay_t<decltype(an)>;
                if constexpr (std::is_same_v<T, MinPoint>)
                    return fixed_point_step_min(an, abr.a, abr.b, abr.rho, cfg.sigma_floor);
                else
                    return fixed_point_step_slope(an, abr.a, abr.b, abr.rho, cfg.sigma_floor);
            },
            anchor);
        m = next.m;
        sigma = next.sigma;
        carried = next.flags;
    }
    result.elapsed =
        std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - started);
    result.params = result.trace.last().params();
    return result;
}

AnchorScorer fpi_rase_scorer(const Smile& s, FpiConfig cfg) {
    return [s, cfg](const MinPoint& mp) {
        const auto fit = fpi_fit(s, mp, cfg);
        return compute_metrics(s, fit.params).rase;
    };
}

} // namespace fpisvi
