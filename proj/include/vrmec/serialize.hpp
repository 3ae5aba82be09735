// serialize.hpp
//
// JSON round-trips for configs, scenarios, decisions and solve records, and
// the per-iteration bound trace as CSV.

#pragma once

#include <ostream>
#include <vector>

#include <json.hpp>

#include "vrmec/decision.hpp"
#include "vrmec/latency.hpp"
#include "vrmec/model.hpp"
#include "vrmec/result.hpp"

namespace vrmec {

using Json = nlohmann::json;

// Missing keys keep the desk-preset defaults; "preset": "desk" | "large"
// selects the base. Unknown keys or wrong types raise ConfigError.
GenerationConfig generation_config_from_json(const Json& j);
Json to_json(const GenerationConfig& c);

Json to_json(const Scenario& s);
Scenario scenario_from_json(const Json& j);

Json to_json(const Decision& d);
Decision decision_from_json(const Json& j);

Json to_json(const FeasibilityReport& r);
Json to_json(const SolveResult& r, bool include_decision = true);

// Header: iteration,f_min,f_max,incumbent,boxes_open
void write_trace_csv(std::ostream& out, const std::vector<TraceEntry>& trace);

}  // namespace vrmec
