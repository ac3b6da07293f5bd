#include "fpisvi/cli.hpp"

#include "fpisvi/diagnostics.hpp"
#include "fpisvi/errors.hpp"
#include "fpisvi/fpi_solver.hpp"
#include "fpisvi/io.hpp"
#include "fpisvi/minpoint.hpp"
#include "fpisvi/qe_baseline.hpp"
#include "fpisvi/report.hpp"
#include "fpisvi/rotation.hpp"

#include "CLI11.hpp"

#include <charconv>
#include <fstream>
#include <future>
#include <ostream>
#include <sstream>

namespace fpisvi {

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::vector<double> parse_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        double v = 0.0;
        const auto* end = item.data() + item.size();
        const auto [ptr, ec] = std::from_chars(item.data(), end, v);
        if (ec != std::errc{} || ptr != end) throw UsageError("bad number '" + item + "' in " + what);
        out.push_back(v);
    }
    return out;
}

struct AnchorChoice {
    Anchor anchor;
    Json extra; ///< Method III bookkeeping
};

MinPoint fallback_to_method_I(const Smile& s) {
    auto mp = min_point_method_I(s);
    mp.boundary_fallback = true;
    return mp;
}

AnchorChoice choose_min_anchor(const std::string& spec, const Smile& s, std::size_t samples, std::uint64_t seed,
                               const FpiConfig& cfg) {
    if (spec == "auto" || spec == "II") return {min_point_auto(s), {}};
    if (spec == "I") return {min_point_method_I(s), {}};
    if (spec == "III") {
        try {
            const auto r = min_point_method_III(s, samples, seed, fpi_rase_scorer(s, cfg));
            return {r.point, Json{{"method_III", Json{{"radius", r.radius},
                                                      {"candidates", r.candidates},
                                                      {"best_rase", r.score},
                                                      {"seed", seed}}}}};
        } catch (const SviError& e) {
            if (e.kind() != ErrorKind::BoundaryMin) throw;
            return {fallback_to_method_I(s), {}};
        }
    }
    if (spec.rfind("analytic:", 0) == 0) {
        const auto v = parse_list(spec.substr(9), "--anchor analytic:");
        if (v.size() != 5) throw UsageError("--anchor analytic: needs a,b,rho,m,sigma");
        return {analytic_min_point({v[0], v[1], v[2], v[3], v[4]}), {}};
    }
    if (spec.rfind("point:", 0) == 0) {
        const auto v = parse_list(spec.substr(6), "--anchor point:");
        if (v.size() != 2) throw UsageError("--anchor point: needs x,v");
        return {MinPoint{v[0], v[1], MinPointSource::UserSupplied, false}, {}};
    }
    throw UsageError("unknown --anchor '" + spec + "'");
}

SlopeAnchor choose_slope_anchor(const std::string& spec, const Smile& s, std::optional<std::size_t> index) {
    if (spec == "auto") return default_slope_anchor(s, index);
    if (spec.rfind("point:", 0) == 0) {
        const auto v = parse_list(spec.substr(6), "--anchor point:");
        if (v.size() != 2 && v.size() != 3) throw UsageError("--anchor point: needs x,v or x,v,v_x");
        return {v[0], v[1], v.size() == 3 ? v[2] : 0.0, 0};
    }
    throw UsageError("fpi-uniform accepts --anchor auto or point:x,v[,v_x]");
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path);
    if (!f) throw SviError(ErrorKind::IoError, "cannot write " + path);
    f << text;
    if (!f) throw SviError(ErrorKind::IoError, "write failure on " + path);
}

struct FitOptions {
    std::string input;
    std::string method = "fpi";
    std::string anchor = "auto";
    std::optional<std::size_t> anchor_index;
    std::size_t max_iters = 50;
    double tol = 1e-3;
    bool fixed_iters = false;
    double theta = default_theta;
    std::uint64_t seed = 1;
    std::size_t samples = 10;
    bool trace = false;
    bool no_timing = false;
    std::string report;
    std::string curve_out;

    FpiConfig fpi_config() const {
        FpiConfig cfg;
        cfg.max_iters = max_iters;
        cfg.tolerance = tol;
        cfg.stop_rule = fixed_iters ? StopRule::FixedIterations : StopRule::IterationsOrTolerance;
        return cfg;
    }
};

FitReport make_report(const std::string& method, const Anchor& anchor, const FitResult& fit, const Smile& frame,
                      const ErrorMetrics& metrics, const FitOptions& opt) {
    FitReport r;
    r.method = method;
    r.anchor = anchor;
    r.params = fit.params;
    r.metrics = metrics;
    r.iterations = fit.trace.iterations();
    r.stop_reason = fit.trace.stop_reason;
    if (!opt.no_timing) r.wall_time_ns = fit.elapsed.count();
    if (fit.trace.steps.size() >= 2) r.certificate = certify(fit.trace, frame, anchor);
    r.clamps = fit.trace.clamp_counts();
    if (opt.trace) r.trace = fit.trace;
    return r;
}

struct FitOutcome {
    FitReport report;
    std::function<double(double)> curve;
};

FitOutcome run_fit(const Smile& s, const FitOptions& opt, std::ostream& err) {
    const FpiConfig cfg = opt.fpi_config();
    if (opt.method == "fpi" || opt.method == "qe") {
        auto choice = choose_min_anchor(opt.anchor, s, opt.samples, opt.seed, cfg);
        const MinPoint& mp = std::get<MinPoint>(choice.anchor);
        FitResult fit;
        if (opt.method == "fpi") {
            fit = fpi_fit(s, mp, cfg);
        } else {
            QeConfig qcfg;
            qcfg.max_iters = opt.max_iters;
            fit = qe_fit(s, mp, qcfg);
        }
        FitOutcome out{make_report(opt.method, mp, fit, s, compute_metrics(s, fit.params), opt), {}};
        out.report.extra = std::move(choice.extra);
        const SviParams p = fit.params;
        out.curve = [p](double x) { return svi_eval(p, x); };
        return out;
    }
    if (opt.method == "fpi-uniform") {
        const SlopeAnchor sa = choose_slope_anchor(opt.anchor, s, opt.anchor_index);
        const FitResult fit = fpi_fit(s, sa, cfg);
        FitOutcome out{make_report(opt.method, sa, fit, s, compute_metrics(s, fit.params), opt), {}};
        const SviParams p = fit.params;
        out.curve = [p](double x) { return svi_eval(p, x); };
        return out;
    }
    if (opt.method == "fpi-rotated") {
        if (opt.anchor != "auto") throw UsageError("fpi-rotated picks its own anchor; use --anchor auto");
        const RotationFit rf = fit_via_rotation(s, opt.theta, cfg);
        std::vector<double> fitted;
        for (const auto& p : s) fitted.push_back(rf.curve(p.x));
        const auto vs = s.vs();
        std::vector<SmilePoint> frame_pts(s.begin(), s.end());
        if (rf.curve.mirrored())
            for (auto& p : frame_pts) p.x = -p.x;
        const Smile rotated = rotate_points(Smile::from_unsorted(std::move(frame_pts), Smile::SignPolicy::Any),
                                            opt.theta);
        FitOutcome out{make_report(opt.method, rf.anchor, rf.fit, rotated, compute_metrics(vs, fitted), opt), {}};
        out.report.extra = Json{{"frame", "rotated"},
                                {"theta", opt.theta},
                                {"mirrored", rf.curve.mirrored()},
                                {"b_original", rf.b_original},
                                {"rho_original", rf.rho_original},
                                {"theta_valid", rf.theta_valid}};
        if (!rf.theta_valid)
            err << "warning: theta " << opt.theta << " violates 0 < theta < arctan(2b) for the fitted b "
                << rf.b_original << "\n";
        const RotatedCurve curve = rf.curve;
        out.curve = [curve](double x) { return curve(x); };
        return out;
    }
    throw UsageError("unknown --method '" + opt.method + "'");
}

void add_fit_options(CLI::App& cmd, FitOptions& opt) {
    cmd.add_option("--input", opt.input, "smile CSV (x,v)")->required();
    cmd.add_option("--anchor", opt.anchor, "auto|I|II|III|analytic:a,b,rho,m,sigma|point:x,v");
    cmd.add_option("--max-iters", opt.max_iters, "iteration cap")->check(CLI::PositiveNumber);
    cmd.add_option("--tol", opt.tol, "residual-norm stopping threshold");
    cmd.add_flag("--fixed-iters", opt.fixed_iters, "ignore --tol and run exactly --max-iters steps");
    cmd.add_option("--seed", opt.seed, "Method III sampling seed");
    cmd.add_option("--samples", opt.samples, "Method III candidate count")->check(CLI::PositiveNumber);
    cmd.add_flag("--trace", opt.trace, "include the per-iteration trace");
    cmd.add_flag("--no-timing", opt.no_timing, "omit wall time so reports are reproducible byte for byte");
    cmd.add_option("--report", opt.report, "write the JSON report here instead of stdout");
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fixed-point SVI smile calibration", "fpisvi"};
    app.require_subcommand(1);

    FitOptions fit_opt;
    auto* fit = app.add_subcommand("fit", "calibrate one smile");
    add_fit_options(*fit, fit_opt);
    fit->add_option("--method", fit_opt.method, "fpi|fpi-uniform|fpi-rotated|qe")
        ->check(CLI::IsMember({"fpi", "fpi-uniform", "fpi-rotated", "qe"}));
    fit->add_option("--anchor-index", fit_opt.anchor_index, "observation index (0-based) for fpi-uniform");
    fit->add_option("--theta", fit_opt.theta, "rotation angle for fpi-rotated (radians)");
    fit->add_option("--curve-out", fit_opt.curve_out, "write fitted curve CSV");

    int sim_case = 0;
    std::string sim_out;
    auto* sim = app.add_subcommand("simulate", "write a synthetic smile");
    sim->add_option("--case", sim_case, "case id 1..4")->required();
    sim->add_option("--out", sim_out, "output CSV (stdout if omitted)");

    FitOptions cmp_opt;
    auto* cmp = app.add_subcommand("compare", "fpi and qe side by side");
    add_fit_options(*cmp, cmp_opt);

    std::string cert_report;
    std::string cert_input;
    std::string cert_out;
    CertifyOptions cert_opts;
    auto* cert = app.add_subcommand("certify", "re-check convergence conditions on a stored trace");
    cert->add_option("--report", cert_report, "fit report written with --trace")->required();
    cert->add_option("--input", cert_input, "the smile CSV the report was fitted on")->required();
    cert->add_option("--alpha", cert_opts.alpha)->check(CLI::Range(0.0, 1.0));
    cert->add_option("--L", cert_opts.L)->check(CLI::Range(0.0, 1.0));
    cert->add_option("--delta", cert_opts.delta)->check(CLI::PositiveNumber);
    cert->add_option("--out", cert_out, "write the certificate here instead of stdout");

    std::vector<std::string> argv_store{"fpisvi"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return exit_input_error;
    }

    try {
        if (*fit) {
            const Smile s = load_smile(fit_opt.input);
            const FitOutcome res = run_fit(s, fit_opt, err);
            write_text(fit_opt.report, dump(to_json(res.report)), out);
            if (!fit_opt.curve_out.empty()) emit_curve(res.curve, s, fit_opt.curve_out);
        } else if (*sim) {
            const SimCase c = simulate_case(sim_case);
            std::ostringstream text;
            write_smile_csv(text, c.smile);
            write_text(sim_out, text.str(), out);
        } else if (*cmp) {
            const Smile s = load_smile(cmp_opt.input);
            FitOptions fpi_opt = cmp_opt;
            fpi_opt.method = "fpi";
            FitOptions qe_opt = cmp_opt;
            qe_opt.method = "qe";
            std::ostringstream fpi_err;
            std::ostringstream qe_err;
            auto fpi_job = std::async(std::launch::async, [&] { return run_fit(s, fpi_opt, fpi_err); });
            auto qe_job = std::async(std::launch::async, [&] { return run_fit(s, qe_opt, qe_err); });
            const FitOutcome a = fpi_job.get();
            const FitOutcome b = qe_job.get();
            err << fpi_err.str() << qe_err.str();
            Json summary{{"fpi_rase", a.report.metrics.rase},
                         {"qe_rase", b.report.metrics.rase},
                         {"fpi_better", a.report.metrics.rase < b.report.metrics.rase}};
            if (a.report.wall_time_ns && b.report.wall_time_ns && *a.report.wall_time_ns > 0)
                summary["qe_over_fpi_time"] =
                    static_cast<double>(*b.report.wall_time_ns) / static_cast<double>(*a.report.wall_time_ns);
            Json j{{"fpi", to_json(a.report)}, {"qe", to_json(b.report)}, {"summary", std::move(summary)}};
            write_text(cmp_opt.report, dump(j), out);
        } else if (*cert) {
            std::ifstream f(cert_report);
            if (!f) throw SviError(ErrorKind::IoError, "cannot open " + cert_report);
            Json stored;
            try {
                stored = Json::parse(f);
            } catch (const nlohmann::json::exception& e) {
                throw SviError(ErrorKind::ParseError, cert_report + ": " + e.what());
            }
            if (!stored.contains("trace"))
                throw SviError(ErrorKind::ParseError, cert_report + " has no trace; refit with --trace");
            const FitTrace trace = trace_from_json(stored.at("trace"));
            const Anchor anchor = anchor_from_json(stored.at("anchor"));
            Smile s = load_smile(cert_input);
            if (stored.contains("details") && stored["details"].value("frame", "") == "rotated") {
                std::vector<SmilePoint> pts(s.begin(), s.end());
                if (stored["details"].value("mirrored", false))
                    for (auto& p : pts) p.x = -p.x;
                s = rotate_points(Smile::from_unsorted(std::move(pts), Smile::SignPolicy::Any),
                                  stored["details"].at("theta").get<double>());
            }
            write_text(cert_out, dump(to_json(certify(trace, s, anchor, cert_opts))), out);
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return exit_input_error;
    } catch (const SviError& e) {
        err << "error: " << e.what() << "\n";
        return is_input_error(e.kind()) ? exit_input_error : exit_numerical_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_numerical_error;
    }
    return exit_ok;
}

} // namespace fpisvi
