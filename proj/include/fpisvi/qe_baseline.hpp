#pragma once

#include "fpisvi/fpi_solver.hpp"
#include "fpisvi/svi_model.hpp"

#include <cstddef>
#include <functional>

namespace fpisvi {

struct NmConfig {
    double reflection = 1.0;
    double expansion = 2.0;
    double contraction = 0.5;
    double shrink = 0.5;
    std::size_t max_evals = 200;
    double tolerance = 1e-10;
    double initial_scale = 0.05;       ///< relative step for the initial simplex
    double initial_scale_floor = 1e-4; ///< absolute lower bound of that step
};

/// Objective value returned for sigma <= 0.
inline constexpr double sigma_penalty = 1e12;

struct Point2 {
    double m = 0.0;
    double sigma = 0.0;
};

struct NmResult {
    Point2 best;
    double value = 0.0;
    std::size_t evaluations = 0;
    bool restarted = false;
};

using Objective2 = std::function<double(double m, double sigma)>;

/// Nelder-Mead on (m, sigma). sigma <= 0 is scored as sigma_penalty without
/// calling the objective. Restarts once with a fresh simplex when the first
/// pass ends on its starting vertex.
NmResult nelder_mead_2d(const Objective2& objective, Point2 start, const NmConfig& cfg = {});

struct QeConfig {
    std::size_t max_iters = 50;
    NmConfig nm;
};

/// Quasi-explicit baseline: each outer step minimises ||V - Y(m, sigma) beta||^2
/// over (m, sigma) with beta frozen (warm-started at the previous (m, sigma)),
/// then re-solves beta. Starts from (m0, sigma0) = (x_min, v_min) and records
/// the same trace schema as fpi_fit.
FitResult qe_fit(const Smile& s, const MinPoint& anchor, const QeConfig& cfg = {});

} // namespace fpisvi
