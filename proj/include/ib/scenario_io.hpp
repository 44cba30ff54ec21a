#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "ib/agent.hpp"
#include "ib/hob.hpp"
#include "ib/types.hpp"

namespace ib {

// A fully specified experiment instance: environment parameters, the true
// HOB model, and the agent settings frozen alongside them.
struct Scenario {
    ScenarioConfig config;
    IncrementalityParams params;
    HobModel hob;
    AgentConfig agent;
};

// Parses the scenario JSON document (see scenarios/ for the schema) and
// validates every structural invariant; throws with the full violation list
// on failure.
Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario(const std::filesystem::path& path);
nlohmann::json scenario_to_json(const Scenario& s);

}  // namespace ib
