#include "fpisvi/minpoint.hpp"

#include "fpisvi/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

namespace fpisvi {

namespace {

double unit_uniform(std::mt19937_64& gen) {
    // 53 random mantissa bits in [0, 1); identical on every standard library
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

bool interior(const Smile& s, std::size_t j) { return j > 0 && j + 1 < s.size(); }

} // namespace

QuadraticFit fit_quadratic(const SmilePoint& p0, const SmilePoint& p1, const SmilePoint& p2) {
    const double d01 = (p1.v - p0.v) / (p1.x - p0.x);
    const double d12 = (p2.v - p1.v) / (p2.x - p1.x);
    const double c1 = (d12 - d01) / (p2.x - p0.x);
    const double c2 = d01 - c1 * (p0.x + p1.x);
    const double c3 = p0.v - d01 * p0.x + c1 * p0.x * p1.x;
    return {c1, c2, c3};
}

std::size_t argmin_index(const Smile& s) noexcept {
    std::size_t best = 0;
    for (std::size_t i = 1; i < s.size(); ++i)
        if (s[i].v < s[best].v) best = i;
    return best;
}

MinPoint min_point_method_I(const Smile& s) {
    const auto& p = s[argmin_index(s)];
    return {p.x, p.v, MinPointSource::MethodI, false};
}

MinPoint min_point_method_II(const Smile& s) {
    const std::size_t p = argmin_index(s);
    if (!interior(s, p))
        throw SviError(ErrorKind::BoundaryMin, "lowest observation is at index " + std::to_string(p));
    const auto q = fit_quadratic(s[p - 1], s[p], s[p + 1]);
    if (!(q.c1 > 0.0)) throw SviError(ErrorKind::NonConvexStencil, "three-point stencil is not convex");
    return {-q.c2 / (2.0 * q.c1), (4.0 * q.c1 * q.c3 - q.c2 * q.c2) / (4.0 * q.c1),
            MinPointSource::MethodII, false};
}

MinPoint min_point_auto(const Smile& s) {
    try {
        return min_point_method_II(s);
    } catch (const SviError& e) {
        if (e.kind() != ErrorKind::BoundaryMin && e.kind() != ErrorKind::NonConvexStencil) throw;
        auto mp = min_point_method_I(s);
        mp.boundary_fallback = true;
        return mp;
    }
}

double method_III_radius(const Smile& s) {
    const std::size_t p = argmin_index(s);
    double r = std::numeric_limits<double>::infinity();
    if (p > 0) r = std::min(r, std::hypot(s[p - 1].x - s[p].x, s[p - 1].v - s[p].v));
    if (p + 1 < s.size()) r = std::min(r, std::hypot(s[p + 1].x - s[p].x, s[p + 1].v - s[p].v));
    return std::max(r, method_III_radius_floor);
}

MethodIIIResult min_point_method_III(const Smile& s, std::size_t n_samples, std::uint64_t seed,
                                     const AnchorScorer& scorer) {
    if (n_samples == 0) throw SviError(ErrorKind::DomainError, "Method III needs at least one sample");
    const std::size_t p = argmin_index(s);
    if (!interior(s, p))
        throw SviError(ErrorKind::BoundaryMin, "lowest observation is at index " + std::to_string(p));

    const double r = method_III_radius(s);
    const SmilePoint centre = s[p];

    auto safe_score = [&](const MinPoint& mp) {
        try {
            const double score = scorer(mp);
            return std::isnan(score) ? std::numeric_limits<double>::infinity() : score;
        } catch (const SviError&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    MethodIIIResult best;
    best.radius = r;
    best.score = std::numeric_limits<double>::infinity();
    bool have_best = false;
    auto consider = [&](MinPoint mp) {
        mp.source = MinPointSource::MethodIII;
        const double score = safe_score(mp);
        ++best.candidates;
        if (!have_best || score < best.score) {
            best.point = mp;
            best.score = score;
            have_best = true;
        }
    };

    try {
        const auto vertex = min_point_method_II(s);
        if (std::hypot(vertex.x_min - centre.x, vertex.v_min - centre.v) < r && vertex.v_min >= 0.0)
            consider(vertex);
    } catch (const SviError&) {
        // a non-convex stencil just means only random candidates compete
    }

    std::mt19937_64 gen(seed);
    for (std::size_t k = 0; k < n_samples; ++k) {
        MinPoint mp;
        for (int attempt = 0; attempt < 1000; ++attempt) {
            const double radius = r * std::sqrt(unit_uniform(gen));
            const double angle = 2.0 * std::numbers::pi * unit_uniform(gen);
            mp.x_min = centre.x + radius * std::cos(angle);
            mp.v_min = centre.v + radius * std::sin(angle);
            if (mp.v_min >= 0.0) break;
        }
        if (mp.v_min < 0.0) mp.v_min = 0.0;
        consider(mp);
    }
    return best;
}

SlopeAnchor slope_anchor_method_Ip(const Smile& s, std::size_t j) {
    if (j >= s.size()) throw SviError(ErrorKind::BoundaryIndex, "index out of range");
    std::size_t c = j;
    if (c == 0) c = 1;
    if (c + 1 == s.size()) c = s.size() - 2;
    const double vx = (s[c + 1].v - s[c - 1].v) / (s[c + 1].x - s[c - 1].x);
    return {s[j].x, s[j].v, vx, j};
}

SlopeAnchor slope_anchor_method_IIp(const Smile& s, std::size_t j) {
    if (!interior(s, j))
        throw SviError(ErrorKind::BoundaryIndex, "Method II' needs an interior index, got " + std::to_string(j));
    const auto q = fit_quadratic(s[j - 1], s[j], s[j + 1]);
    return {s[j].x, s[j].v, q.slope(s[j].x), j};
}

SlopeAnchor default_slope_anchor(const Smile& s, std::optional<std::size_t> index) {
    const std::size_t j = index.value_or(argmin_index(s));
    if (j >= s.size()) throw SviError(ErrorKind::BoundaryIndex, "anchor index out of range");
    return interior(s, j) ? slope_anchor_method_IIp(s, j) : slope_anchor_method_Ip(s, j);
}

} // namespace fpisvi
