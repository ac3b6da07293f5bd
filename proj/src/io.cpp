#include "fpisvi/io.hpp"

#include "fpisvi/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

namespace fpisvi {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::optional<double> parse_number(std::string_view field) {
    field = trim(field);
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double value = 0.0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (field.empty() || ec != std::errc{} || ptr != end) return std::nullopt;
    return value;
}

struct Fields {
    std::string_view first;
    std::string_view second;
    std::size_t count = 0;
};

Fields split(std::string_view line) {
    Fields f;
    const auto comma = line.find(',');
    if (comma == std::string_view::npos) {
        f.first = line;
        f.count = 1;
        return f;
    }
    f.first = line.substr(0, comma);
    f.second = line.substr(comma + 1);
    f.count = 2 + static_cast<std::size_t>(std::count(f.second.begin(), f.second.end(), ','));
    return f;
}

[[noreturn]] void parse_error(const std::string& source, std::size_t row, std::size_t column,
                              const std::string& what) {
    throw SviError(ErrorKind::ParseError,
                   source + ": row " + std::to_string(row) + ", column " + std::to_string(column) + ": " + what);
}

} // namespace

std::string format_double(double value) {
    char buf[32];
    const int n = std::snprintf(buf, sizeof buf, "%.17g", value);
    return std::string(buf, static_cast<std::size_t>(n));
}

Smile parse_smile_csv(std::istream& in, const std::string& source) {
    std::vector<SmilePoint> points;
    std::string line;
    std::size_t row = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++row;
        const std::string_view text = trim(line);
        if (text.empty()) continue;
        const Fields f = split(text);
        const auto x = parse_number(f.first);
        const auto v = f.count == 2 ? parse_number(f.second) : std::nullopt;
        if (first_content && !x) {
            // header row
            first_content = false;
            continue;
        }
        first_content = false;
        if (f.count != 2) parse_error(source, row, 1, "expected 2 columns, found " + std::to_string(f.count));
        if (!x) parse_error(source, row, 1, "not a number: '" + std::string(trim(f.first)) + "'");
        if (!v) parse_error(source, row, 2, "not a number: '" + std::string(trim(f.second)) + "'");
        points.push_back({*x, *v});
    }
    if (in.bad()) throw SviError(ErrorKind::IoError, "read failure on " + source);
    return Smile::from_unsorted(std::move(points));
}

Smile load_smile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SviError(ErrorKind::IoError, "cannot open " + path);
    return parse_smile_csv(in, path);
}

void write_smile_csv(std::ostream& out, const Smile& s) {
    out << "x,v\n";
    for (const auto& p : s) out << format_double(p.x) << ',' << format_double(p.v) << '\n';
}

void write_smile_csv(const std::string& path, const Smile& s) {
    std::ofstream out(path);
    if (!out) throw SviError(ErrorKind::IoError, "cannot write " + path);
    write_smile_csv(out, s);
    if (!out) throw SviError(ErrorKind::IoError, "write failure on " + path);
}

std::vector<double> GridSpec::points() const {
    std::vector<double> xs;
    xs.reserve(count);
    for (std::size_t i = 0; i < count; ++i) xs.push_back(start + step * static_cast<double>(i));
    return xs;
}

Smile sample_smile(const SviParams& p, const GridSpec& grid) {
    std::vector<SmilePoint> pts;
    for (double x : grid.points()) pts.push_back({x, svi_eval(p, x)});
    return Smile(std::move(pts));
}

SimCase simulate_case(int id) {
    SviParams truth;
    switch (id) {
    case 1: truth = {0.5, 0.5, -0.5, -0.3, 0.5}; break;
    case 2: truth = {0.05, 0.63, -0.55, 0.036, 0.26}; break;
    case 3: truth = {0.05, 0.63, 0.55, 0.036, 0.26}; break;
    case 4: truth = {0.1, 0.06, -0.7, 0.24, 0.06}; break;
    default: throw SviError(ErrorKind::UnknownCase, "simulation case must be 1..4, got " + std::to_string(id));
    }
    GridSpec grid;
    return {id, truth, grid, sample_smile(truth, grid)};
}

std::vector<CurveRow> curve_rows(const std::function<double(double)>& fitted, const Smile& s) {
    std::vector<CurveRow> rows;
    rows.reserve(s.size() + dense_curve_points);
    for (const auto& p : s) rows.push_back({p.x, fitted(p.x), p.v});
    const double lo = s[0].x - 0.1;
    const double hi = s[s.size() - 1].x + 0.1;
    for (std::size_t k = 0; k < dense_curve_points; ++k) {
        const double x = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(dense_curve_points - 1);
        rows.push_back({x, fitted(x), std::nullopt});
    }
    return rows;
}

void write_curve_csv(std::ostream& out, const std::vector<CurveRow>& rows) {
    out << "x,v_fitted,v_observed\n";
    for (const auto& r : rows) {
        out << format_double(r.x) << ',' << format_double(r.v_fitted) << ',';
        if (r.v_observed) out << format_double(*r.v_observed);
        out << '\n';
    }
}

void emit_curve(const std::function<double(double)>& fitted, const Smile& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw SviError(ErrorKind::IoError, "cannot write " + path);
    write_curve_csv(out, curve_rows(fitted, s));
    if (!out) throw SviError(ErrorKind::IoError, "write failure on " + path);
}

} // namespace fpisvi
