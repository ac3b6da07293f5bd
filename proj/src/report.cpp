#include "fpisvi/report.hpp"

#include "fpisvi/errors.hpp"

namespace fpisvi {

namespace {

MinPointSource source_from(const std::string& s) {
    for (auto src : {MinPointSource::Analytic, MinPointSource::MethodI, MinPointSource::MethodII,
                     MinPointSource::MethodIII, MinPointSource::UserSupplied})
        if (to_string(src) == s) return src;
    throw SviError(ErrorKind::ParseError, "unknown anchor provenance '" + s + "'");
}

StopReason stop_from(const std::string& s) {
    for (auto r : {StopReason::MaxIterations, StopReason::Tolerance, StopReason::Stalled})
        if (to_string(r) == s) return r;
    throw SviError(ErrorKind::ParseError, "unknown stop reason '" + s + "'");
}

} // namespace

Json to_json(const SviParams& p) {
    return Json{{"a", p.a}, {"b", p.b}, {"rho", p.rho}, {"m", p.m}, {"sigma", p.sigma}};
}

Json to_json(const Anchor& anchor) {
    return std::visit(
        [](const auto& an) -> Json {
            using T = std::decay_t<decltype(an)>;
            if constexpr (std::is_same_v<T, MinPoint>) {
                return Json{{"kind", "min-point"},
                            {"provenance", std::string(to_string(an.source))},
                            {"x_min", an.x_min},
                            {"v_min", an.v_min},
                            {"boundary_fallback", an.boundary_fallback}};
            } else {
                return Json{{"kind", "slope"},     {"x", an.x}, {"v", an.v}, {"v_x", an.v_x},
                            {"source_index", an.source_index}};
            }
        },
        anchor);
}

Json to_json(const FitTrace& trace) {
    Json steps = Json::array();
    for (std::size_t n = 0; n < trace.steps.size(); ++n) {
        const auto& s = trace.steps[n];
        steps.push_back(Json{{"n", n},
                             {"a", s.a},
                             {"b", s.b},
                             {"rho", s.rho},
                             {"m", s.m},
                             {"sigma", s.sigma},
                             {"L", s.residual},
                             {"flags", s.flags}});
    }
    return Json{{"stop_reason", std::string(to_string(trace.stop_reason))}, {"steps", std::move(steps)}};
}

Json to_json(const ClampCounts& c) {
    return Json{{"b_clamped", c.b_clamped},
                {"rho_projected", c.rho_projected},
                {"sigma_clamped", c.sigma_clamped},
                {"slope_clamped", c.slope_clamped},
                {"denominator_clamped", c.denominator_clamped}};
}

Json to_json(const ConvergenceCertificate& cert) {
    Json mono;
    const char* names[] = {"a", "b", "rho", "m", "sigma"};
    for (std::size_t k = 0; k < 5; ++k) mono[names[k]] = std::string(to_string(cert.monotonicity[k]));
    Json out{{"delta", cert.options.delta},
             {"alpha", cert.options.alpha},
             {"L", cert.options.L},
             {"n0_found", cert.n0_found},
             {"n0", cert.n0_found ? Json(cert.n0) : Json(nullptr)},
             {"L_b_lower", cert.L_b_lower},
             {"L_rho_upper", cert.L_rho_upper},
             {"a_nonneg", cert.a_nonneg},
             {"constants_defined", cert.constants_defined},
             {"L_m", cert.constants.L_m},
             {"L_sigma", cert.constants.L_sigma},
             {"sup_scaled_L0", Json{cert.sup_scaled[0], cert.sup_scaled[1], cert.sup_scaled[2]}},
             {"cond_iii_prime_holds", cert.cond_iii_prime_holds},
             {"two_L_below_L_b", cert.two_L_below_L_b},
             {"contraction", cert.contraction},
             {"sufficient_conditions_hold", cert.sufficient_conditions_hold},
             {"monotonicity", std::move(mono)},
             {"limit_case", std::string(to_string(cert.limit_case))}};
    return out;
}

Json to_json(const FitReport& r) {
    Json out;
    out["method"] = r.method;
    out["anchor"] = to_json(r.anchor);
    out["params"] = to_json(r.params);
    out["rase"] = r.metrics.rase;
    out["rmse"] = r.metrics.rmse;
    out["n"] = r.metrics.n;
    out["iterations"] = r.iterations;
    out["stop_reason"] = std::string(to_string(r.stop_reason));
    if (r.wall_time_ns) out["wall_time_ns"] = *r.wall_time_ns;
    out["clamp_events"] = to_json(r.clamps);
    if (r.certificate) out["certificate"] = to_json(*r.certificate);
    if (!r.extra.is_null()) out["details"] = r.extra;
    if (r.trace) out["trace"] = to_json(*r.trace);
    return out;
}

FitTrace trace_from_json(const Json& j) {
    try {
        FitTrace trace;
        trace.stop_reason = stop_from(j.at("stop_reason").get<std::string>());
        for (const auto& s : j.at("steps")) {
            FitStep st;
            st.a = s.at("a").get<double>();
            st.b = s.at("b").get<double>();
            st.rho = s.at("rho").get<double>();
            st.m = s.at("m").get<double>();
            st.sigma = s.at("sigma").get<double>();
            st.residual = s.at("L").get<double>();
            st.flags = s.at("flags").get<std::uint32_t>();
            trace.steps.push_back(st);
        }
        return trace;
    } catch (const nlohmann::json::exception& e) {
        throw SviError(ErrorKind::ParseError, std::string("malformed trace: ") + e.what());
    }
}

Anchor anchor_from_json(const Json& j) {
    try {
        const auto kind = j.at("kind").get<std::string>();
        if (kind == "min-point") {
            MinPoint mp;
            mp.x_min = j.at("x_min").get<double>();
            mp.v_min = j.at("v_min").get<double>();
            mp.source = source_from(j.at("provenance").get<std::string>());
            mp.boundary_fallback = j.value("boundary_fallback", false);
            return mp;
        }
        if (kind == "slope") {
            SlopeAnchor sa;
            sa.x = j.at("x").get<double>();
            sa.v = j.at("v").get<double>();
            sa.v_x = j.at("v_x").get<double>();
            sa.source_index = j.value("source_index", std::size_t{0});
            return sa;
        }
        throw SviError(ErrorKind::ParseError, "unknown anchor kind '" + kind + "'");
    } catch (const nlohmann::json::exception& e) {
        throw SviError(ErrorKind::ParseError, std::string("malformed anchor: ") + e.what());
    }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

} // namespace fpisvi
