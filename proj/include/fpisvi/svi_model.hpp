#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace fpisvi {

/// Raw SVI slice: v(x) = a + b (rho (x - m) + sqrt((x - m)^2 + sigma^2)).
///
/// |rho| = 1 is a legal value here (the rotation path needs it); only the
/// analytic minimum rejects it.
struct SviParams {
    double a = 0.0;     ///< variance level
    double b = 0.0;     ///< wing slope, >= 0
    double rho = 0.0;   ///< skew, in [-1, 1]
    double m = 0.0;     ///< horizontal shift
    double sigma = 0.0; ///< smoothing width, > 0

    bool is_valid() const noexcept;
};

struct SmilePoint {
    double x; ///< log-moneyness
    double v; ///< implied variance
};

/// Observations sorted by strictly increasing x, N >= 3, all v finite and >= 0.
class Smile {
public:
    static constexpr std::size_t min_points = 3;

    /// Rotated point sets may dip below zero, so the sign check is optional.
    enum class SignPolicy { NonNegative, Any };

    /// Validates the invariants; throws SviError(InvalidSmile/TooFewPoints/DuplicateAbscissa).
    explicit Smile(std::vector<SmilePoint> points, SignPolicy sign = SignPolicy::NonNegative);

    /// Sorts by x first, then validates.
    static Smile from_unsorted(std::vector<SmilePoint> points,
                               SignPolicy sign = SignPolicy::NonNegative);

    std::size_t size() const noexcept { return points_.size(); }
    const SmilePoint& operator[](std::size_t i) const { return points_[i]; }
    std::span<const SmilePoint> points() const noexcept { return points_; }

    std::vector<double> xs() const;
    std::vector<double> vs() const;

    auto begin() const noexcept { return points_.begin(); }
    auto end() const noexcept { return points_.end(); }

private:
    std::vector<SmilePoint> points_;
};

enum class MinPointSource { Analytic, MethodI, MethodII, MethodIII, UserSupplied };

std::string_view to_string(MinPointSource source) noexcept;

struct MinPoint {
    double x_min = 0.0;
    double v_min = 0.0;
    MinPointSource source = MinPointSource::UserSupplied;
    /// Set when a stencil method fell back to the raw argmin because it sits on
    /// the edge of the data. Such smiles are better served by the rotation or
    /// slope-anchored paths.
    bool boundary_fallback = false;
};

double svi_eval(const SviParams& p, double x) noexcept;
double svi_slope(const SviParams& p, double x) noexcept;

std::vector<double> svi_eval(const SviParams& p, std::span<const double> xs);

/// 1 - rho^2 below this is treated as rho^2 = 1.
inline constexpr double degenerate_rho_gap = 1e-12;

/// Closed-form minimum of the curve. Throws DegenerateRho for rho^2 = 1 and
/// DomainError for b <= 0.
MinPoint analytic_min_point(const SviParams& p);

} // namespace fpisvi
