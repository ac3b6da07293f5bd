#pragma once

#include "fpisvi/svi_model.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>

namespace fpisvi {

/// v(x) = c1 x^2 + c2 x + c3
struct QuadraticFit {
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;

    double slope(double x) const noexcept { return 2.0 * c1 * x + c2; }
};

/// Exact interpolating quadratic through three points with distinct x.
QuadraticFit fit_quadratic(const SmilePoint& p0, const SmilePoint& p1, const SmilePoint& p2);

/// A point on the smile together with an estimate of the slope there.
struct SlopeAnchor {
    double x = 0.0;
    double v = 0.0;
    double v_x = 0.0;
    std::size_t source_index = 0; ///< zero-based index into the smile
};

/// Index of the smallest v; ties go to the smallest index.
std::size_t argmin_index(const Smile& s) noexcept;

/// Lowest observation.
MinPoint min_point_method_I(const Smile& s);

/// Vertex of the quadratic through the lowest observation and its two
/// neighbours. Throws BoundaryMin when the lowest point is the first or last
/// observation and NonConvexStencil when the stencil is not convex.
MinPoint min_point_method_II(const Smile& s);

/// Method II, falling back to Method I (with boundary_fallback set) whenever
/// the stencil is unusable.
MinPoint min_point_auto(const Smile& s);

/// Radius of the sampling disc around the lowest observation: distance to the
/// nearer of its two neighbours (only the existing one at a boundary), floored.
double method_III_radius(const Smile& s);

inline constexpr double method_III_radius_floor = 1e-8;

/// Lower is better. Usually the RASE of a full fit seeded with the candidate.
using AnchorScorer = std::function<double(const MinPoint&)>;

struct MethodIIIResult {
    MinPoint point;
    double score = 0.0;
    double radius = 0.0;
    std::size_t candidates = 0;
};

/// Draws n_samples candidate minimum points uniformly from the open disc of
/// radius method_III_radius(s) around the lowest observation, scores each and
/// keeps the best. The Method II vertex competes as well when it falls inside
/// the disc. Deterministic for a given seed.
MethodIIIResult min_point_method_III(const Smile& s, std::size_t n_samples, std::uint64_t seed,
                                     const AnchorScorer& scorer);

/// Central difference slope at j (zero-based); endpoints copy their neighbour.
SlopeAnchor slope_anchor_method_Ip(const Smile& s, std::size_t j);

/// Slope of the interpolating quadratic through j-1, j, j+1. Throws
/// BoundaryIndex for the first and last observation.
SlopeAnchor slope_anchor_method_IIp(const Smile& s, std::size_t j);

/// Default slope anchor: the lowest observation unless an index is given,
/// Method II' in the interior and Method I' at the edges.
SlopeAnchor default_slope_anchor(const Smile& s, std::optional<std::size_t> index = std::nullopt);

} // namespace fpisvi
