#include "fpisvi/qe_baseline.hpp"

#include "fpisvi/errors.hpp"
#include "fpisvi/linear_calibration.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace fpisvi {

namespace {

struct Vertex {
    Point2 p;
    double f = 0.0;
};

Point2 lerp(const Point2& from, const Point2& to, double t) {
    return {from.m + t * (to.m - from.m), from.sigma + t * (to.sigma - from.sigma)};
}

class Simplex {
public:
    Simplex(const Objective2& objective, const NmConfig& cfg) : objective_(objective), cfg_(cfg) {}

    double eval(const Point2& p) {
        ++evaluations;
        if (!(p.sigma > 0.0)) return sigma_penalty;
        const double f = objective_(p.m, p.sigma);
        return std::isnan(f) ? sigma_penalty : f;
    }

    Vertex run(const Point2& start, double direction) {
        const double hm = direction * std::max(cfg_.initial_scale * std::abs(start.m), cfg_.initial_scale_floor);
        const double hs = direction * std::max(cfg_.initial_scale * std::abs(start.sigma), cfg_.initial_scale_floor);
        std::array<Vertex, 3> v{Vertex{start, 0.0}, Vertex{{start.m + hm, start.sigma}, 0.0},
                                Vertex{{start.m, start.sigma + hs}, 0.0}};
        const std::size_t budget_end = evaluations + cfg_.max_evals;
        for (auto& x : v) x.f = eval(x.p);

        auto by_value = [](const Vertex& l, const Vertex& r) { return l.f < r.f; };
        while (evaluations < budget_end) {
            std::stable_sort(v.begin(), v.end(), by_value);
            const double size = std::max(std::hypot(v[1].p.m - v[0].p.m, v[1].p.sigma - v[0].p.sigma),
                                         std::hypot(v[2].p.m - v[0].p.m, v[2].p.sigma - v[0].p.sigma));
            if (size <= cfg_.tolerance && v[2].f - v[0].f <= cfg_.tolerance * (1.0 + std::abs(v[0].f))) break;

            const Point2 centroid{0.5 * (v[0].p.m + v[1].p.m), 0.5 * (v[0].p.sigma + v[1].p.sigma)};
            const Point2 xr = lerp(centroid, v[2].p, -cfg_.reflection);
            const double fr = eval(xr);
            if (evaluations >= budget_end) {
                // no budget left for a follow-up move; keep the reflection only if it helps
                if (fr < v[2].f) v[2] = {xr, fr};
                break;
            }
            if (fr < v[0].f) {
                const Point2 xe = lerp(centroid, xr, cfg_.expansion);
                const double fe = eval(xe);
                v[2] = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
                continue;
            }
            if (fr < v[1].f) {
                v[2] = {xr, fr};
                continue;
            }
            if (fr < v[2].f) {
                const Point2 xc = lerp(centroid, xr, cfg_.contraction);
                const double fc = eval(xc);
                if (fc <= fr) {
                    v[2] = {xc, fc};
                    continue;
                }
            } else {
                const Point2 xc = lerp(centroid, v[2].p, cfg_.contraction);
                const double fc = eval(xc);
                if (fc < v[2].f) {
                    v[2] = {xc, fc};
                    continue;
                }
            }
            if (evaluations + 2 > budget_end) break;
            for (std::size_t i = 1; i < v.size(); ++i) {
                v[i].p = lerp(v[0].p, v[i].p, cfg_.shrink);
                v[i].f = eval(v[i].p);
            }
        }
        return *std::min_element(v.begin(), v.end(), by_value);
    }

    std::size_t evaluations = 0;

private:
    const Objective2& objective_;
    const NmConfig& cfg_;
};

} // namespace

NmResult nelder_mead_2d(const Objective2& objective, Point2 start, const NmConfig& cfg) {
    Simplex simplex(objective, cfg);
    Vertex best = simplex.run(start, 1.0);
    NmResult out;
    if (best.p.m == start.m && best.p.sigma == start.sigma) {
        // stuck on the starting vertex: try once more with the simplex flipped
        const Vertex retry = simplex.run(start, -1.0);
        if (retry.f < best.f) best = retry;
        out.restarted = true;
    }
    out.best = best.p;
    out.value = best.f;
    out.evaluations = simplex.evaluations;
    return out;
}

FitResult qe_fit(const Smile& s, const MinPoint& anchor, const QeConfig& cfg) {
    const auto xs = s.xs();
    const auto vs = s.vs();
    const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(vs.data(), static_cast<Eigen::Index>(vs.size()));
    constexpr double sigma_floor = 1e-8;

    double m = anchor.x_min;
    double sigma = anchor.v_min;
    if (!std::isfinite(m) || !std::isfinite(sigma)) throw SviError(ErrorKind::DomainError, "anchor must be finite");
    std::uint32_t carried = FlagNone;
    if (!(sigma >= sigma_floor)) {
        sigma = sigma_floor;
        carried |= FlagSigmaClamped;
    }

    FitResult result;
    result.trace.steps.reserve(cfg.max_iters + 1);
    const auto started = std::chrono::steady_clock::now();

    auto record = [&](const LsqSolution& sol) {
        const auto abr = beta_to_abr(sol.beta);
        FitStep step{abr.a, abr.b, abr.rho, m, sigma, sol.residual_norm, carried};
        if (abr.b_clamped) step.flags |= FlagBClamped;
        if (abr.rho_projected) step.flags |= FlagRhoProjected;
        result.trace.steps.push_back(step);
        carried = FlagNone;
    };

    LsqSolution sol = lsq_solve(build_design(xs, m, sigma), v);
    record(sol);
    for (std::size_t n = 1; n <= cfg.max_iters; ++n) {
        const Beta beta = sol.beta;
        const Objective2 residual = [&](double mm, double ss) {
            const double s2 = ss * ss;
            double sum = 0.0;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                const double d = xs[i] - mm;
                const double e = vs[i] - (beta.b1 + beta.b2 * d + beta.b3 * std::sqrt(d * d + s2));
                sum += e * e;
            }
            return sum;
        };
        const NmResult inner = nelder_mead_2d(residual, {m, sigma}, cfg.nm);
        m = inner.best.m;
        sigma = inner.best.sigma;
        sol = lsq_solve(build_design(xs, m, sigma), v);
        record(sol);
    }
    result.trace.stop_reason = StopReason::MaxIterations;
    result.elapsed =
        std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - started);
    result.params = result.trace.last().params();
    return result;
}

} // namespace fpisvi
