#include "hcflow/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "hcflow/experiment.hpp"
#include "hcflow/io.hpp"
#include "hcflow/oracle.hpp"

namespace hcflow {

namespace {

struct InvalidConfig : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  int d = 0;
  std::string dist = "bernoulli:0.75";
  std::uint64_t seed = 1;
  std::string network;
  double kappa = 0.6;
  int M = 7;
  double omega = 0.02;
  double timeLimit = 0.0;
  int radius = 4;
  std::string out;
  std::string format = "json";
};

void addNetworkOptions(CLI::App* app, Common& c) {
  app->add_option("--d", c.d, "cube dimension");
  app->add_option("--dist", c.dist, "capacity law: bernoulli:p | scaled:a:p | finite:v:p,... | uniform01");
  app->add_option("--seed", c.seed, "sampling seed");
  app->add_option("--network", c.network, "network JSON file instead of --d/--dist/--seed");
}

void addOutputOptions(CLI::App* app, Common& c) {
  app->add_option("--out", c.out, "output file (stdout when omitted)");
  app->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
}

void addScalingOptions(CLI::App* app, Common& c) {
  app->add_option("--kappa", c.kappa, "exponent in ell = d^kappa");
  app->add_option("--M", c.M, "boost factor near the endpoints");
  app->add_option("--radius", c.radius, "smoothing radius (even)");
}

CapacityNetwork network(const Common& c) {
  if (!c.network.empty()) {
    try {
      return loadNetwork(c.network);
    } catch (const std::exception& e) {
      throw InvalidConfig(e.what());
    }
  }
  if (c.d < 1 || c.d > kMaxDimension)
    throw InvalidConfig("--d must lie in [1, " + std::to_string(kMaxDimension) + "], got " + std::to_string(c.d));
  try {
    return sample(CapacityDistribution::parse(c.dist), CubeTopology(c.d), c.seed);
  } catch (const std::exception& e) {
    throw InvalidConfig(e.what());
  }
}

PipelineParams pipelineParams(const Common& c) {
  if (!(c.kappa > 0.0 && c.kappa < 1.0)) throw InvalidConfig("--kappa must lie in (0, 1)");
  if (c.M < 1) throw InvalidConfig("--M must be at least 1");
  if (c.radius < 2 || c.radius % 2) throw InvalidConfig("--radius must be even and at least 2");
  PipelineParams p;
  p.scaling.kappa = c.kappa;
  p.scaling.M = c.M;
  p.middle.layer.smoothingRadius = c.radius;
  return p;
}

void flattenJson(const Json& j, const std::string& prefix, std::ostream& out) {
  if (j.is_object()) {
    for (const auto& item : j.items()) flattenJson(item.value(), prefix.empty() ? item.key() : prefix + "." + item.key(), out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flattenJson(j[i], prefix + "." + std::to_string(i), out);
  } else {
    std::string text = j.is_string() ? j.get<std::string>() : j.dump();
    if (text.find_first_of(",\"\n") != std::string::npos) {
      std::string quoted = "\"";
      for (char ch : text) quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      text = quoted + "\"";
    }
    out << prefix << ',' << text << '\n';
  }
}

// json as is, or a key,value CSV holding the same leaves
std::string render(const Json& j, const std::string& format) {
  if (format == "json") return j.dump(2) + "\n";
  std::ostringstream out;
  out << "key,value\n";
  flattenJson(j, "", out);
  return out.str();
}

void emit(const Common& c, const std::string& text, std::ostream& out) {
  if (c.out.empty())
    out << text;
  else
    writeTextFile(c.out, text);
}

}  // namespace

int runCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Uniform multicommodity flow on random-capacity hypercubes", "hcflow"};
  app.require_subcommand(1);
  Common c;

  CLI::App* sampleCmd = app.add_subcommand("sample", "sample a capacity network and write it as JSON");
  addNetworkOptions(sampleCmd, c);
  sampleCmd->add_option("--out", c.out, "output file (stdout when omitted)");

  std::string mode = "opp";
  std::vector<Vertex> pair;
  bool withFlows = false;
  CLI::App* solveCmd = app.add_subcommand("solve", "run the constructive pipeline");
  addNetworkOptions(solveCmd, c);
  addScalingOptions(solveCmd, c);
  addOutputOptions(solveCmd, c);
  solveCmd->add_option("--mode", mode, "opp, all or pair")->check(CLI::IsMember({"opp", "all", "pair"}));
  solveCmd->add_option("--pair", pair, "endpoints u v for --mode pair")->expected(2);
  solveCmd->add_flag("--flows", withFlows, "include full flow dumps (large for d > 8)");

  CLI::App* oracleCmd = app.add_subcommand("oracle", "upper bound and approximate maximum uniform flow");
  addNetworkOptions(oracleCmd, c);
  addOutputOptions(oracleCmd, c);
  oracleCmd->add_option("--mode", mode, "opp or all")->check(CLI::IsMember({"opp", "all"}));
  oracleCmd->add_option("--omega", c.omega, "relative accuracy in (0, 1)");
  oracleCmd->add_option("--time-limit", c.timeLimit, "seconds before returning the best flow so far (0: none)");

  std::string auditKind = "antipodal";
  CLI::App* auditCmd = app.add_subcommand("audit", "per-edge demand of the superposed scaled networks");
  addNetworkOptions(auditCmd, c);
  addScalingOptions(auditCmd, c);
  addOutputOptions(auditCmd, c);
  auditCmd->add_option("--kind", auditKind, "antipodal or subcube")->check(CLI::IsMember({"antipodal", "subcube"}));

  std::string flowFile;
  std::vector<Vertex> endpoints;
  CLI::App* verifyCmd = app.add_subcommand("verify", "check a flow dump against a network");
  addNetworkOptions(verifyCmd, c);
  addOutputOptions(verifyCmd, c);
  verifyCmd->add_option("--flow", flowFile, "flow dump JSON")->required();
  verifyCmd->add_option("--pair", endpoints, "source and sink for the balance check")->expected(2);

  std::string configFile;
  CLI::App* expCmd = app.add_subcommand("experiment", "run a sampling campaign from a JSON config");
  addOutputOptions(expCmd, c);
  expCmd->add_option("--config", configFile, "experiment config JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitInvalid;
  }

  out << std::setprecision(17);
  try {
    if (*sampleCmd) {
      const CapacityNetwork net = network(c);
      const std::string text = networkToJson(net).dump() + "\n";
      emit(c, text, out);
      return kExitOk;
    }

    if (*solveCmd) {
      const CapacityNetwork net = network(c);
      const PipelineParams params = pipelineParams(c);
      if (mode == "pair") {
        if (pair.size() != 2) throw InvalidConfig("--mode pair needs --pair u v");
        if (!net.topo.contains(pair[0]) || !net.topo.contains(pair[1]) || pair[0] == pair[1])
          throw InvalidConfig("--pair needs two distinct vertices of the cube");
        Pipeline pipeline(net, params);
        pipeline.enableCaching(true);
        Json j{{"schemaVersion", kSchemaVersion}, {"mode", "pair"}, {"u", pair[0]}, {"v", pair[1]}};
        int code = kExitOk;
        try {
          const CommodityResult r = pipeline.commodity(pair[0], pair[1]);
          const FeasibilityReport feas = checkFeasible(r.flow, net, 1e-9);
          j["volume"] = r.volume;
          j["middleVolume"] = r.middleVolume;
          j["finalMu"] = r.finalMu;
          j["middleHypothesisHeld"] = r.middleHypothesisHeld;
          j["maxCapacityRatio"] = feas.maxRatio;
          if (withFlows) j["flow"] = flowToJson(r.flow);
        } catch (const ConstructionError& e) {
          j["failure"] = {{"stage", e.stage()}, {"message", e.what()}};
          code = kExitConstruction;
        }
        emit(c, render(j, c.format), out);
        return code;
      }
      const UniformFlowSolution sol =
          solveUniform(net, mode == "opp" ? PairMode::Opp : PairMode::All, params, SolveOptions{withFlows, {}});
      const Json j = solutionToJson(sol, withFlows);
      emit(c, render(j, c.format), out);
      if (!c.out.empty()) out << "phi=" << sol.phi << "\n";
      return sol.failures.empty() && sol.phi > 0.0 ? kExitOk : kExitConstruction;
    }

    if (*oracleCmd) {
      const CapacityNetwork net = network(c);
      if (!(c.omega > 0.0 && c.omega < 1.0)) throw InvalidConfig("--omega must lie in (0, 1)");
      const PairSet ps = mode == "opp" ? PairSet::opp() : PairSet::all();
      const BoundReport b = upperBounds(net, ps);
      ConcurrentOptions co;
      co.omega = c.omega;
      if (c.timeLimit < 0.0) throw InvalidConfig("--time-limit must be nonnegative");
      co.timeLimitSeconds = c.timeLimit;
      ConcurrentResult r;
      try {
        r = maxConcurrentUniform(net, ps, co);
      } catch (const BudgetError& e) {
        throw InvalidConfig(e.what());
      }
      const Json j{{"schemaVersion", kSchemaVersion}, {"mode", mode},          {"cAv", b.cAv},
                   {"upperBound", b.bound},            {"phiOracle", r.phi},   {"dualBound", r.upperBound},
                   {"iterations", r.iterations},       {"converged", r.converged}, {"omega", c.omega}};
      emit(c, render(j, c.format), out);
      return kExitOk;
    }

    if (*auditCmd) {
      const CapacityNetwork net = network(c);
      const PipelineParams params = pipelineParams(c);
      if (auditKind == "antipodal") {
        const AntipodalAudit a = auditAntipodalSuperposition(net, params.scaling);
        std::ostringstream text;
        if (c.format == "csv") {
          writeAuditCsv(text, net, a);
        } else {
          Json rows = Json::array();
          for (Eigen::Index e = 0; e < net.cap.size(); ++e)
            rows.push_back({{"edgeIndex", e},
                            {"baseCap", net.cap[e]},
                            {"demand", a.demand[e]},
                            {"ratio", net.cap[e] > 0.0 ? a.demand[e] / net.cap[e] : 0.0}});
          text << Json{{"schemaVersion", kSchemaVersion}, {"ell", a.ell}, {"epsD", a.epsD}, {"edges", rows}}.dump(2)
               << "\n";
        }
        emit(c, text.str(), out);
        return kExitOk;
      }
      if (net.topo.dim() > kSubcubeAuditMaxDim)
        throw InvalidConfig("subcube audit needs d <= " + std::to_string(kSubcubeAuditMaxDim));
      const SubcubeAudit a = auditSubcubeSuperposition(net, params.scaling);
      std::ostringstream text;
      text << std::setprecision(17);
      if (c.format == "csv") {
        text << "edgeIndex,baseCap,allPairs,farMiddle\n";
        for (Eigen::Index e = 0; e < net.cap.size(); ++e)
          text << e << ',' << net.cap[e] << ',' << a.allPairs[e] << ',' << a.farMiddle[e] << '\n';
      } else {
        Json rows = Json::array();
        for (Eigen::Index e = 0; e < net.cap.size(); ++e)
          rows.push_back({{"edgeIndex", e}, {"baseCap", net.cap[e]}, {"allPairs", a.allPairs[e]},
                          {"farMiddle", a.farMiddle[e]}});
        text << Json{{"schemaVersion", kSchemaVersion}, {"edges", rows}}.dump(2) << "\n";
      }
      emit(c, text.str(), out);
      return kExitOk;
    }

    if (*verifyCmd) {
      const CapacityNetwork net = network(c);
      DirectedFlow f;
      try {
        f = flowFromJson(readJsonFile(flowFile));
      } catch (const std::exception& e) {
        throw InvalidConfig(e.what());
      }
      if (f.topology().dim() != net.topo.dim()) throw InvalidConfig("flow and network dimensions differ");
      const FeasibilityReport feas = checkFeasible(f, net, 1e-9);
      Json j{{"schemaVersion", kSchemaVersion},
             {"feasible", feas.feasible},
             {"maxRatio", feas.maxRatio},
             {"worstExcess", feas.worstExcess},
             {"conservationResidual", conservationResidual(f)},
             {"size", flowSize(f)}};
      bool ok = feas.feasible;
      if (endpoints.size() == 2) {
        if (!net.topo.contains(endpoints[0]) || !net.topo.contains(endpoints[1]) || endpoints[0] == endpoints[1])
          throw InvalidConfig("--pair needs two distinct vertices of the cube");
        const BalanceReport b = balanceReport(f, {endpoints[0]}, {endpoints[1]});
        j["volume"] = b.volume;
        j["mu"] = b.mu;
        j["interiorImbalance"] = b.interiorImbalance;
        ok = ok && b.interiorImbalance <= 1e-9 * std::max(1.0, b.size);
      }
      j["ok"] = ok;
      emit(c, render(j, c.format), out);
      return ok ? kExitOk : kExitConstruction;
    }

    if (*expCmd) {
      ExperimentConfig config;
      try {
        config = ExperimentConfig::fromJson(readJsonFile(configFile));
      } catch (const FormatError& e) {
        throw InvalidConfig(e.what());
      }
      const ExperimentReport report = runExperiment(config);
      emit(c, c.format == "json" ? report.toJson().dump(2) + "\n" : report.toCsv(), out);
      return kExitOk;
    }
  } catch (const InvalidConfig& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const ConstructionError& e) {
    err << "construction failed: " << e.what() << "\n";
    return kExitConstruction;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConstruction;
  }
  return kExitInvalid;
}

}  // namespace hcflow
