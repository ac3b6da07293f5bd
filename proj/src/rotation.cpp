#include "fpisvi/rotation.hpp"

#include "fpisvi/errors.hpp"
#include "fpisvi/minpoint.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace fpisvi {

namespace {

constexpr double abscissa_gap = 1e-12;
constexpr int max_doublings = 10;

void require_quarter_turn(double theta) {
    if (!(theta > 0.0 && theta < std::numbers::pi / 2.0))
        throw SviError(ErrorKind::InvalidTheta, "theta must lie in (0, pi/2), got " + std::to_string(theta));
}

void require_map_domain(const SviParams& p, double theta) {
    if (std::abs(p.rho + 1.0) > 1e-12) throw SviError(ErrorKind::DomainError, "rotation map expects rho = -1");
    if (!(p.b > 0.0)) throw SviError(ErrorKind::DomainError, "rotation map expects b > 0");
    if (!(theta > 0.0 && theta < std::atan(2.0 * p.b)))
        throw SviError(ErrorKind::InvalidTheta, "need 0 < theta < arctan(2b) for a finite rotated minimum");
}

} // namespace

Smile rotate_points(const Smile& s, double theta) {
    require_quarter_turn(theta);
    std::vector<SmilePoint> pts;
    pts.reserve(s.size());
    for (const auto& p : s) {
        const auto r = rotate(p.x, p.v, theta);
        pts.push_back({r.x, r.v});
    }
    std::sort(pts.begin(), pts.end(), [](const SmilePoint& l, const SmilePoint& r) { return l.x < r.x; });
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (pts[i].x - pts[i - 1].x <= abscissa_gap)
            throw SviError(ErrorKind::NotAFunction, "rotated abscissae collide; theta too large for this data");
    return Smile(std::move(pts), Smile::SignPolicy::Any);
}

RotatedParamMap forward_param_map(const SviParams& p, double theta) {
    require_map_domain(p, theta);
    const double t = std::tan(theta);
    const double c = std::cos(theta);
    const double sn = std::sin(theta);

    RotatedParamMap out;
    out.b_prime = p.b / ((1.0 + 2.0 * p.b * t) * c * c);
    out.rho_prime = (t / p.b + t * t - 1.0) * c * c;
    // the asymptotes meet at (m, a); that point rotates like any other
    out.m_prime = p.m * c - p.a * sn;
    out.a_prime = p.m * sn + p.a * c;
    // the quadratic form (w - b rho u)^2 - b^2 u^2 keeps its determinant under rotation
    out.sigma_prime_sq = p.sigma * p.sigma * p.b / out.b_prime;
    if (out.sigma_prime_sq < 0.0) throw SviError(ErrorKind::NegativeSigmaSquared, "rotated sigma^2 < 0");
    out.sigma_prime = std::sqrt(out.sigma_prime_sq);
    return out;
}

PrintedRotationMap printed_rotation_map(const SviParams& p, double theta) {
    require_map_domain(p, theta);
    const double t = std::tan(theta);
    const double c = std::cos(theta);
    const double c2 = c * c;

    PrintedRotationMap out;
    out.rho_prime = (t / p.b + t * t - 1.0) * c2;
    out.b_prime = p.b / ((1.0 + 2.0 * p.b * t) * c2);
    out.m0 = p.a * t / c - p.m / c;
    out.a0 = out.m0 * c2 * c2 * t * (-t / p.b + 2.0 + out.rho_prime / (c2 * p.b));
    out.a_prime = p.a / c - out.a0;
    out.m_prime = (c2 * out.m0 - out.a0 / out.b_prime) / out.rho_prime;
    out.sigma_prime_sq = p.sigma * p.sigma * p.b / out.b_prime - 2.0 * out.a0 * out.a0 / (out.b_prime * out.b_prime) +
                         2.0 * out.a0 * c2 * out.m0 / out.b_prime;
    return out;
}

RotatedCurve::RotatedCurve(SviParams rotated, double theta, bool mirrored, double x_lo, double x_hi)
    : rotated_(rotated), theta_(theta), mirrored_(mirrored), lo_(std::min(x_lo, x_hi)), hi_(std::max(x_lo, x_hi)) {
    require_quarter_turn(theta);
}

double RotatedCurve::preimage(double x) const {
    const double target = mirrored_ ? -x : x;
    const double c = std::cos(theta_);
    const double sn = std::sin(theta_);
    // x' cos t + v'(x') sin t is increasing whenever the rotated slope stays above -cot t
    auto g = [&](double xp) { return xp * c + svi_eval(rotated_, xp) * sn - target; };

    double lo = lo_;
    double hi = hi_;
    double width = std::max(hi - lo, 1.0);
    int doublings = 0;
    while (g(lo) > 0.0) {
        if (++doublings > max_doublings) throw SviError(ErrorKind::BracketFailure, "no sign change below range");
        lo -= width;
        width *= 2.0;
    }
    doublings = 0;
    width = std::max(hi - lo, 1.0);
    while (g(hi) < 0.0) {
        if (++doublings > max_doublings) throw SviError(ErrorKind::BracketFailure, "no sign change above range");
        hi += width;
        width *= 2.0;
    }
    for (int it = 0; it < 400 && hi - lo > 1e-12 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (g(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double RotatedCurve::operator()(double x) const {
    const double xp = preimage(x);
    return -xp * std::sin(theta_) + svi_eval(rotated_, xp) * std::cos(theta_);
}

RotationFit fit_via_rotation(const Smile& s, double theta, const FpiConfig& cfg, MirrorMode mirror) {
    require_quarter_turn(theta);
    const bool mirrored = mirror == MirrorMode::Always ||
                          (mirror == MirrorMode::Auto && s[0].v < s[s.size() - 1].v);

    std::vector<SmilePoint> working(s.begin(), s.end());
    if (mirrored)
        for (auto& p : working) p.x = -p.x;
    const Smile frame = Smile::from_unsorted(std::move(working), Smile::SignPolicy::Any);
    const Smile rotated = rotate_points(frame, theta);

    const MinPoint anchor = min_point_auto(rotated);
    FitResult fit = fpi_fit(rotated, anchor, cfg);
    const SviParams& q = fit.params;

    RotatedParamMap map;
    map.a_prime = q.a;
    map.b_prime = q.b;
    map.rho_prime = q.rho;
    map.m_prime = q.m;
    map.sigma_prime = q.sigma;
    map.sigma_prime_sq = q.sigma * q.sigma;

    // wing slopes of the fitted curve, rotated back into the (possibly mirrored) data frame
    const double lower = std::tan(std::atan(q.b * (q.rho - 1.0)) - theta);
    const double upper = std::tan(std::atan(q.b * (q.rho + 1.0)) - theta);
    const double b_orig = 0.5 * (upper - lower);
    double rho_orig = (upper + lower) / (upper - lower);
    if (mirrored) rho_orig = -rho_orig;

    RotatedCurve curve(q, theta, mirrored, rotated[0].x, rotated[rotated.size() - 1].x);
    return RotationFit{std::move(curve), map, std::move(fit), anchor, b_orig, rho_orig,
                       b_orig > 0.0 && theta < std::atan(2.0 * b_orig)};
}

} // namespace fpisvi
