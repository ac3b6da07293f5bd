#include "fpisvi/svi_model.hpp"

#include "fpisvi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fpisvi {

bool SviParams::is_valid() const noexcept {
    return std::isfinite(a) && std::isfinite(b) && std::isfinite(rho) && std::isfinite(m) &&
           std::isfinite(sigma) && b >= 0.0 && sigma > 0.0 && std::abs(rho) <= 1.0;
}

Smile::Smile(std::vector<SmilePoint> points, SignPolicy sign) : points_(std::move(points)) {
    if (points_.size() < min_points)
        throw SviError(ErrorKind::TooFewPoints,
                       "need at least 3 observations, got " + std::to_string(points_.size()));
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const auto& p = points_[i];
        if (!std::isfinite(p.x) || !std::isfinite(p.v))
            throw SviError(ErrorKind::InvalidSmile, "non-finite value at index " + std::to_string(i));
        if (sign == SignPolicy::NonNegative && p.v < 0.0)
            throw SviError(ErrorKind::InvalidSmile, "negative variance at index " + std::to_string(i));
        if (i > 0) {
            if (p.x == points_[i - 1].x)
                throw SviError(ErrorKind::DuplicateAbscissa, "x = " + std::to_string(p.x) + " repeated");
            if (p.x < points_[i - 1].x)
                throw SviError(ErrorKind::InvalidSmile, "x not increasing at index " + std::to_string(i));
        }
    }
}

Smile Smile::from_unsorted(std::vector<SmilePoint> points, SignPolicy sign) {
    std::stable_sort(points.begin(), points.end(),
                     [](const SmilePoint& l, const SmilePoint& r) { return l.x < r.x; });
    return Smile(std::move(points), sign);
}

std::vector<double> Smile::xs() const {
    std::vector<double> out;
    out.reserve(points_.size());
    for (const auto& p : points_) out.push_back(p.x);
    return out;
}

std::vector<double> Smile::vs() const {
    std::vector<double> out;
    out.reserve(points_.size());
    for (const auto& p : points_) out.push_back(p.v);
    return out;
}

std::string_view to_string(MinPointSource source) noexcept {
    switch (source) {
    case MinPointSource::Analytic: return "analytic";
    case MinPointSource::MethodI: return "method-I";
    case MinPointSource::MethodII: return "method-II";
    case MinPointSource::MethodIII: return "method-III";
    case MinPointSource::UserSupplied: return "user-supplied";
    }
    return "unknown";
}

double svi_eval(const SviParams& p, double x) noexcept {
    const double d = x - p.m;
    return p.a + p.b * (p.rho * d + std::sqrt(d * d + p.sigma * p.sigma));
}

double svi_slope(const SviParams& p, double x) noexcept {
    const double d = x - p.m;
    return p.b * (p.rho + d / std::sqrt(d * d + p.sigma * p.sigma));
}

std::vector<double> svi_eval(const SviParams& p, std::span<const double> xs) {
    std::vector<double> out;
    out.reserve(xs.size());
    for (double x : xs) out.push_back(svi_eval(p, x));
    return out;
}

MinPoint analytic_min_point(const SviParams& p) {
    const double gap = 1.0 - p.rho * p.rho;
    if (gap < degenerate_rho_gap)
        throw SviError(ErrorKind::DegenerateRho, "rho^2 = 1 has no finite minimum");
    if (!(p.b > 0.0)) throw SviError(ErrorKind::DomainError, "b must be positive");
    const double root = std::sqrt(gap);
    return {p.m - p.rho * p.sigma / root, p.a + p.b * p.sigma * root, MinPointSource::Analytic, false};
}

} // namespace fpisvi
