#pragma once

#include "fpisvi/diagnostics.hpp"
#include "fpisvi/fpi_solver.hpp"
#include "fpisvi/svi_model.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace fpisvi {

using Json = nlohmann::ordered_json;

struct FitReport {
    std::string method;
    Anchor anchor;
    SviParams params;
    ErrorMetrics metrics;
    std::size_t iterations = 0;
    StopReason stop_reason = StopReason::MaxIterations;
    std::optional<std::int64_t> wall_time_ns;
    std::optional<ConvergenceCertificate> certificate;
    ClampCounts clamps;
    std::optional<FitTrace> trace;
    Json extra; ///< method-specific fields, e.g. the rotation setup
};

Json to_json(const SviParams& p);
Json to_json(const Anchor& anchor);
Json to_json(const FitTrace& trace);
Json to_json(const ClampCounts& c);
Json to_json(const ConvergenceCertificate& cert);
Json to_json(const FitReport& report);

/// Inverse of to_json(FitTrace) / to_json(Anchor), for re-certifying stored runs.
/// Throws ParseError on malformed input.
FitTrace trace_from_json(const Json& j);
Anchor anchor_from_json(const Json& j);

/// Stable text form: two-space indent, trailing newline.
std::string dump(const Json& j);

} // namespace fpisvi
