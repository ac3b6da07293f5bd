#include "fpisvi/diagnostics.hpp"

#include "fpisvi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fpisvi {

ErrorMetrics compute_metrics(std::span<const double> observed, std::span<const double> fitted) {
    if (observed.size() != fitted.size())
        throw SviError(ErrorKind::LengthMismatch, "observed and fitted lengths differ");
    if (observed.empty()) throw SviError(ErrorKind::LengthMismatch, "no observations");
    double sum_sq = 0.0;
    double max_abs = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double e = observed[i] - fitted[i];
        sum_sq += e * e;
        max_abs = std::max(max_abs, std::abs(e));
    }
    return {std::sqrt(sum_sq / static_cast<double>(observed.size())), max_abs, observed.size()};
}

ErrorMetrics compute_metrics(const Smile& s, const SviParams& p) {
    const auto xs = s.xs();
    const auto vs = s.vs();
    const auto fitted = svi_eval(p, xs);
    return compute_metrics(vs, fitted);
}

LipschitzConstants lemma21_constants(double L_b, double L_rho, double v_min) {
    if (!(L_b > 0.0) || !(L_rho >= 0.0) || !(L_rho < 1.0) || !(v_min >= 0.0))
        throw SviError(ErrorKind::DomainError, "need L_b > 0, 0 <= L_rho < 1, v_min >= 0");
    const double r2 = L_rho * L_rho;
    const double g = 1.0 - r2;
    const double b2 = L_b * L_b;
    LipschitzConstants c;
    c.L_m = (L_b * (1.0 + r2) * v_min + L_b * L_rho * g + L_rho * g * v_min) / (b2 * g * g);
    c.L_sigma = (L_rho * L_b * v_min + L_b * g + g * v_min) / (b2 * std::pow(g, 1.5));
    return c;
}

std::array<double, 3> lemma22_L0(const Smile& s, double m, double sigma, const Beta& beta,
                                 const LipschitzConstants& c) {
    const auto y = build_design(s, m, sigma);
    const auto vs = s.vs();
    const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(vs.data(), static_cast<Eigen::Index>(vs.size()));
    const double n = static_cast<double>(s.size());
    const double b2 = std::abs(beta.b2);
    const double b3 = std::abs(beta.b3);

    const Eigen::Vector3d beta1(beta.b1, 2.0 * beta.b2, beta.b3);
    const Eigen::Vector3d beta2(beta.b1, beta.b2, 2.0 * beta.b3);
    const double resid1 = (v - y.columns * beta1).sum();
    const double resid2 = (v - y.columns * beta2).sum();
    const double sum_x2 = y.shifted().sum();
    const double sum_x3 = y.root().sum();

    return {
        n * b2 * c.L_m + n * b3 * (c.L_m + c.L_sigma),
        std::abs(resid1) * c.L_m + std::abs(sum_x2 * beta.b3) * (c.L_m + c.L_sigma) + b2 + b3,
        std::abs(resid2) * (c.L_m + c.L_sigma) + std::abs(sum_x3 * beta.b2) * c.L_m + b2 + b3,
    };
}

std::string_view to_string(Monotonicity m) noexcept {
    switch (m) {
    case Monotonicity::Constant: return "constant";
    case Monotonicity::Increasing: return "increasing";
    case Monotonicity::Decreasing: return "decreasing";
    case Monotonicity::Mixed: return "mixed";
    }
    return "unknown";
}

Monotonicity classify_monotonicity(std::span<const double> seq, double tol) {
    bool up = false;
    bool down = false;
    for (std::size_t i = 1; i < seq.size(); ++i) {
        const double d = seq[i] - seq[i - 1];
        const double flat = tol * (1.0 + std::abs(seq[i - 1]));
        if (d > flat) up = true;
        if (d < -flat) down = true;
    }
    if (up && down) return Monotonicity::Mixed;
    if (up) return Monotonicity::Increasing;
    if (down) return Monotonicity::Decreasing;
    return Monotonicity::Constant;
}

std::string_view to_string(LimitCase c) noexcept {
    switch (c) {
    case LimitCase::None: return "none";
    case LimitCase::IncreasingAB: return "a,b increasing; rho decreasing";
    case LimitCase::DecreasingAB: return "a,b decreasing; rho increasing";
    case LimitCase::Converged: return "converged";
    }
    return "unknown";
}

namespace {

bool rising(Monotonicity m) { return m == Monotonicity::Increasing || m == Monotonicity::Constant; }
bool falling(Monotonicity m) { return m == Monotonicity::Decreasing || m == Monotonicity::Constant; }

double anchor_level(const Anchor& anchor) {
    return std::visit(
        [](const auto& an) {
            if constexpr (std::is_same_v<std::decay_t<decltype(an)>, MinPoint>)
                return an.v_min;
            else
                return an.v;
        },
        anchor);
}

} // namespace

ConvergenceCertificate certify(const FitTrace& trace, const Smile& s, const Anchor& anchor,
                               const CertifyOptions& opts) {
    const auto& steps = trace.steps;
    if (steps.size() < 2) throw SviError(ErrorKind::DomainError, "certification needs at least two steps");

    ConvergenceCertificate cert;
    cert.options = opts;
    cert.deltas.resize(steps.size());
    for (std::size_t n = 1; n < steps.size(); ++n) {
        cert.deltas[n] = {std::abs(steps[n].a - steps[n - 1].a), std::abs(steps[n].b - steps[n - 1].b),
                          std::abs(steps[n].rho - steps[n - 1].rho)};
        if (!cert.n0_found && cert.deltas[n].da < opts.delta && cert.deltas[n].db < opts.delta &&
            cert.deltas[n].drho < opts.delta) {
            cert.n0_found = true;
            cert.n0 = n;
        }
    }

    const std::size_t tail_start = cert.n0_found ? cert.n0 : 0;
    cert.L_b_lower = std::numeric_limits<double>::infinity();
    cert.L_rho_upper = 0.0;
    cert.a_nonneg = true;
    std::array<std::vector<double>, 5> seqs;
    for (std::size_t n = tail_start; n < steps.size(); ++n) {
        const auto& st = steps[n];
        cert.L_b_lower = std::min(cert.L_b_lower, st.b);
        cert.L_rho_upper = std::max(cert.L_rho_upper, std::abs(st.rho));
        cert.a_nonneg = cert.a_nonneg && st.a >= 0.0;
        seqs[0].push_back(st.a);
        seqs[1].push_back(st.b);
        seqs[2].push_back(st.rho);
        seqs[3].push_back(st.m);
        seqs[4].push_back(st.sigma);
    }
    for (std::size_t k = 0; k < seqs.size(); ++k) cert.monotonicity[k] = classify_monotonicity(seqs[k]);

    const auto& mono = cert.monotonicity;
    if (rising(mono[0]) && rising(mono[1]) && falling(mono[2]) && mono[0] != Monotonicity::Constant)
        cert.limit_case = LimitCase::IncreasingAB;
    else if (falling(mono[0]) && falling(mono[1]) && rising(mono[2]) && mono[0] != Monotonicity::Constant)
        cert.limit_case = LimitCase::DecreasingAB;
    else {
        const auto& last = cert.deltas.back();
        if (std::max({last.da, last.db, last.drho}) < 1e-10) cert.limit_case = LimitCase::Converged;
    }

    const double level = anchor_level(anchor);
    cert.constants_defined = cert.L_b_lower > 0.0 && cert.L_rho_upper < 1.0 && level >= 0.0;
    cert.two_L_below_L_b = 2.0 * opts.L < cert.L_b_lower;
    if (!cert.constants_defined) {
        cert.constants.L_m = std::numeric_limits<double>::quiet_NaN();
        cert.constants.L_sigma = std::numeric_limits<double>::quiet_NaN();
        cert.contraction = std::numeric_limits<double>::quiet_NaN();
        return cert;
    }

    cert.constants = lemma21_constants(cert.L_b_lower, cert.L_rho_upper, level);
    cert.contraction = std::max(opts.L, 2.0 * opts.L / cert.L_b_lower);
    cert.sup_scaled = {0.0, 0.0, 0.0};
    for (std::size_t n = tail_start; n < steps.size(); ++n) {
        const auto& st = steps[n];
        const Beta beta{st.a, st.b * st.rho, st.b};
        TailBound tb;
        tb.step = n;
        tb.L0 = lemma22_L0(s, st.m, st.sigma, beta, cert.constants);
        const auto y = build_design(s, st.m, st.sigma);
        const Eigen::Matrix3d gram = y.columns.transpose() * y.columns;
        const Eigen::Vector3d scaled = gram.fullPivLu().solve(Eigen::Vector3d(tb.L0[0], tb.L0[1], tb.L0[2]));
        for (int i = 0; i < 3; ++i) {
            tb.scaled[static_cast<std::size_t>(i)] = std::abs(scaled(i));
            cert.sup_scaled[static_cast<std::size_t>(i)] =
                std::max(cert.sup_scaled[static_cast<std::size_t>(i)], std::abs(scaled(i)));
        }
        cert.tail_bounds.push_back(tb);
    }
    const double bound = (1.0 - opts.alpha) * opts.L;
    cert.cond_iii_prime_holds = std::all_of(cert.sup_scaled.begin(), cert.sup_scaled.end(),
                                            [&](double v) { return v < bound; });
    cert.sufficient_conditions_hold = cert.n0_found && cert.constants_defined && cert.a_nonneg &&
                                      cert.cond_iii_prime_holds && cert.two_L_below_L_b;
    return cert;
}

} // namespace fpisvi
