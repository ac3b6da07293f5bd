#pragma once

#include "fpisvi/svi_model.hpp"

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fpisvi {

/// "%.17g": enough significant digits to round-trip any double.
std::string format_double(double value);

/// Two numeric columns x,v; an optional non-numeric first line is taken as a
/// header. Rows are sorted by x. Throws ParseError (with row and column),
/// TooFewPoints or DuplicateAbscissa.
Smile parse_smile_csv(std::istream& in, const std::string& source = "<stream>");
Smile load_smile(const std::string& path);

/// Writes "x,v" and one row per point with 17 significant digits.
void write_smile_csv(std::ostream& out, const Smile& s);
void write_smile_csv(const std::string& path, const Smile& s);

struct GridSpec {
    double start = -1.9;
    double step = 0.1;
    std::size_t count = 39;

    std::vector<double> points() const;
};

struct SimCase {
    int id = 0;
    SviParams truth;
    GridSpec grid;
    Smile smile;
};

/// The four synthetic cases of the simulation study, sampled exactly on the
/// grid x_i = -1.9 + 0.1 (i - 1), i = 1..39. Throws UnknownCase.
SimCase simulate_case(int id);

/// Same grid, arbitrary parameters (e.g. the rho = -1 rotation demo).
Smile sample_smile(const SviParams& p, const GridSpec& grid = {});

struct CurveRow {
    double x = 0.0;
    double v_fitted = 0.0;
    std::optional<double> v_observed;
};

inline constexpr std::size_t dense_curve_points = 400;

/// Rows at each observation (with the observed value) followed by a dense
/// grid of 400 points on [min x - 0.1, max x + 0.1].
std::vector<CurveRow> curve_rows(const std::function<double(double)>& fitted, const Smile& s);

void write_curve_csv(std::ostream& out, const std::vector<CurveRow>& rows);

/// Writes curve_rows as CSV "x,v_fitted,v_observed". Throws IoError.
void emit_curve(const std::function<double(double)>& fitted, const Smile& s, const std::string& path);

} // namespace fpisvi
