#include "hcflow/io.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace hcflow {

Json networkToJson(const CapacityNetwork& net) {
  Json j;
  j["schemaVersion"] = kSchemaVersion;
  j["d"] = net.topo.dim();
  j["distribution"] = net.dist.toString();
  j["seed"] = net.seed;
  j["generatorVersion"] = net.generatorVersion;
  j["capacities"] = std::vector<double>(net.cap.data(), net.cap.data() + net.cap.size());
  return j;
}

CapacityNetwork networkFromJson(const Json& j) {
  try {
    const int d = j.at("d").get<int>();
    if (d < 1 || d > kMaxDimension) throw FormatError("network file: d out of range");
    const CubeTopology topo(d);
    const auto caps = j.at("capacities").get<std::vector<double>>();
    if (caps.size() != topo.edgeCount())
      throw FormatError("network file: expected " + std::to_string(topo.edgeCount()) + " capacities, got " +
                        std::to_string(caps.size()));
    Eigen::VectorXd cap = Eigen::Map<const Eigen::VectorXd>(caps.data(), static_cast<Eigen::Index>(caps.size()));
    CapacityNetwork net = networkFromCapacities(topo, std::move(cap),
                                                CapacityDistribution::parse(j.at("distribution").get<std::string>()),
                                                j.at("seed").get<std::uint64_t>());
    if (j.contains("generatorVersion")) net.generatorVersion = j["generatorVersion"].get<int>();
    return net;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("network file: ") + e.what());
  }
}

Json readJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
}

void writeTextFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path);
  out << text;
}

void saveNetwork(const CapacityNetwork& net, const std::string& path) {
  writeTextFile(path, networkToJson(net).dump() + "\n");
}

CapacityNetwork loadNetwork(const std::string& path) { return networkFromJson(readJsonFile(path)); }

void writeAuditCsv(std::ostream& out, const CapacityNetwork& base, const AntipodalAudit& audit) {
  out << "edgeIndex,baseCap,demand,ratio\n" << std::setprecision(17);
  for (Eigen::Index e = 0; e < base.cap.size(); ++e) {
    const double c = base.cap[e];
    out << e << ',' << c << ',' << audit.demand[e] << ',' << (c > 0.0 ? audit.demand[e] / c : 0.0) << '\n';
  }
}

Json flowToJson(const DirectedFlow& f) {
  const CubeTopology& topo = f.topology();
  Json edges = Json::array();
  const Eigen::VectorXd& v = f.signedValues();
  for (Eigen::Index e = 0; e < v.size(); ++e) {
    if (v[e] == 0.0) continue;
    const EdgeId id = topo.edgeAt(static_cast<std::size_t>(e));
    edges.push_back({{"edgeId", e},
                     {"lower", id.lower},
                     {"dim", id.dim},
                     {"direction", v[e] > 0.0 ? "up" : "down"},
                     {"value", std::abs(v[e])}});
  }
  return Json{{"schemaVersion", kSchemaVersion}, {"d", topo.dim()}, {"edges", std::move(edges)}};
}

DirectedFlow flowFromJson(const Json& j) {
  try {
    const int d = j.at("d").get<int>();
    if (d < 1 || d > kMaxDimension) throw FormatError("flow dump: d out of range");
    const CubeTopology topo(d);
    DirectedFlow f(topo);
    for (const Json& e : j.at("edges")) {
      const auto idx = e.at("edgeId").get<std::size_t>();
      if (idx >= topo.edgeCount()) throw FormatError("flow dump: edge index out of range");
      const std::string dir = e.at("direction").get<std::string>();
      if (dir != "up" && dir != "down") throw FormatError("flow dump: direction must be up or down");
      const double value = e.at("value").get<double>();
      f.signedValues()[static_cast<Eigen::Index>(idx)] = dir == "up" ? value : -value;
    }
    return f;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("flow dump: ") + e.what());
  }
}

void writeLayerCsv(std::ostream& out, const MiddleReport& report) {
  out << "m,volume,mu,maxUtilization\n" << std::setprecision(17);
  for (const LayerCrossReport& l : report.layers)
    out << l.m << ',' << l.achievedVolume << ',' << l.muAchieved << ',' << l.maxUtilization << '\n';
}

Json solutionToJson(const UniformFlowSolution& sol, bool includeFlows) {
  Json j;
  j["schemaVersion"] = kSchemaVersion;
  j["mode"] = sol.mode == PairMode::Opp ? "opp" : "all";
  j["phi"] = sol.phi;
  j["phiBeforeRescale"] = sol.phiBeforeRescale;
  j["demandRatio"] = sol.demandRatio;
  j["budget"] = sol.budget;
  j["auditPassed"] = sol.auditPassed;
  j["nearShare"] = sol.nearShare;
  j["sampled"] = sol.sampled;
  j["commodities"] = sol.commodities.size();
  j["stages"] = {{"minMiddleVolume", sol.minMiddleVolume},
                 {"maxMiddleMu", sol.maxMiddleMu},
                 {"maxMused", sol.maxMused},
                 {"middleHypothesisFailures", sol.middleHypothesisFailures},
                 {"minRawVolume", sol.phiBeforeRescale}};
  Json failures = Json::array();
  for (const CommodityFailure& f : sol.failures)
    failures.push_back({{"u", f.u}, {"v", f.v}, {"stage", f.stage}, {"message", f.message}});
  j["failures"] = std::move(failures);
  if (includeFlows) {
    Json flows = Json::array();
    for (std::size_t i = 0; i < sol.flows.size(); ++i) {
      Json one = flowToJson(sol.flows[i]);
      one["u"] = sol.commodities[i].u;
      one["v"] = sol.commodities[i].v;
      flows.push_back(std::move(one));
    }
    j["flows"] = std::move(flows);
  }
  return j;
}

}  // namespace hcflow
