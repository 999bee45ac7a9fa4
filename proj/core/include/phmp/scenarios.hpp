#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "phmp/report.hpp"

namespace phmp {

struct ScenarioContext {
  std::string out;  // empty: nothing written
  std::uint64_t seed = 0;
  nlohmann::json config = nlohmann::json::object();  // per-scenario overrides, e.g. {"resolution": 32}
};

std::vector<std::string> scenario_names();
// one-line description per scenario, same order as scenario_names()
std::string scenario_description(const std::string& name);

// runs the pipeline and, when ctx.out is set, writes <out>/<name>/report.json, timings.json and plots.
// unknown names throw ErrorKind::usage
Report run_scenario(const std::string& name, const ScenarioContext& ctx = {});

// several scenarios; ctx.config maps scenario names to their overrides. With jobs > 1 they run
// concurrently, each in its own output directory
std::vector<Report> run_scenarios(const std::vector<std::string>& names, const ScenarioContext& ctx, int jobs);

}  // namespace phmp
