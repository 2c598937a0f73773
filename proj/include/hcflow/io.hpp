#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "hcflow/assemble.hpp"
#include "hcflow/capacities.hpp"
#include "hcflow/flowcore.hpp"
#include "hcflow/layercross.hpp"
#include "hcflow/netscale.hpp"

namespace hcflow {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// {"d", "distribution", "seed", "generatorVersion", "capacities": [...]}
Json networkToJson(const CapacityNetwork& net);
CapacityNetwork networkFromJson(const Json& j);
void saveNetwork(const CapacityNetwork& net, const std::string& path);
CapacityNetwork loadNetwork(const std::string& path);

// header edgeIndex,baseCap,demand,ratio
void writeAuditCsv(std::ostream& out, const CapacityNetwork& base, const AntipodalAudit& audit);

// {"d", "edges": [{"edgeId", "lower", "dim", "direction": "up"|"down", "value"}]}; zero edges omitted
Json flowToJson(const DirectedFlow& f);
DirectedFlow flowFromJson(const Json& j);

// header m,volume,mu,maxUtilization
void writeLayerCsv(std::ostream& out, const MiddleReport& report);

Json solutionToJson(const UniformFlowSolution& sol, bool includeFlows);

Json readJsonFile(const std::string& path);
void writeTextFile(const std::string& path, const std::string& text);

}  // namespace hcflow
