#pragma once

// JSON and CSV emission for pipeline results. Key order is fixed and no
// timings or paths are recorded, so identical inputs give identical bytes.

#include "confrig/rigidity_pipeline.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>

namespace confrig {

using Json = nlohmann::ordered_json;

Json to_json(const GateResult& g);
Json to_json(const HypothesisReport& h);
Json to_json(const RigidityReport& r);
Json scenario_summary(const Scenario& s);

/// Pretty-printed with a trailing newline.
std::string dump(const Json& j);

/// CSV with header r,v,w,v-w for the transferred factor v.
void write_profile_csv(std::ostream& os, const RigidityReport& r);
/// CSV with header r,v_prime,w,v_prime-w for the solver output.
void write_solution_csv(std::ostream& os, const RigidityReport& r);

/// json: report.json. csv: profile.csv, solution.csv and
/// factor_profile.csv (coordinate,value; loadable as a csv factor).
/// Returns the files written.
std::vector<std::filesystem::path> emit_report(const RigidityReport& r, const Scenario& s,
                                               const std::filesystem::path& dir, const std::string& format);

}  // namespace confrig
