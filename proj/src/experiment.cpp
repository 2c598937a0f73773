#include "hcflow/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>
#include <thread>

namespace hcflow {

namespace {

const char* modeName(PairMode m) { return m == PairMode::Opp ? "opp" : "all"; }

template <typename T>
T take(const Json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw FormatError(std::string("experiment config: bad value for '") + key + "'");
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::fromJson(const Json& j) {
  if (!j.is_object()) throw FormatError("experiment config must be a JSON object");
  static const std::set<std::string> known = {"dims", "distribution", "seeds", "mode", "kappa",
                                              "M", "omega", "radius", "epsilon", "constructive",
                                              "oracle", "rowTimeoutSeconds", "workers", "schemaVersion"};
  for (const auto& item : j.items())
    if (!known.count(item.key())) throw FormatError("experiment config: unknown key '" + item.key() + "'");
  ExperimentConfig c;
  c.dims = take<std::vector<int>>(j, "dims");
  c.seeds = take<std::vector<std::uint64_t>>(j, "seeds");
  if (j.contains("distribution")) c.distribution = take<std::string>(j, "distribution");
  if (j.contains("mode")) {
    const auto m = take<std::string>(j, "mode");
    if (m != "opp" && m != "all") throw FormatError("experiment config: mode must be opp or all");
    c.mode = m == "opp" ? PairMode::Opp : PairMode::All;
  }
  if (j.contains("kappa")) c.kappa = take<double>(j, "kappa");
  if (j.contains("M")) c.M = take<int>(j, "M");
  if (j.contains("omega")) c.omega = take<double>(j, "omega");
  if (j.contains("radius")) c.radius = take<int>(j, "radius");
  if (j.contains("epsilon")) c.epsilon = take<double>(j, "epsilon");
  if (j.contains("constructive")) c.constructive = take<bool>(j, "constructive");
  if (j.contains("oracle")) c.oracle = take<bool>(j, "oracle");
  if (j.contains("rowTimeoutSeconds")) c.rowTimeoutSeconds = take<double>(j, "rowTimeoutSeconds");
  if (j.contains("workers")) c.workers = take<int>(j, "workers");

  for (int d : c.dims)
    if (d < 1 || d > kMaxDimension)
      throw FormatError("experiment config: d must lie in [1, " + std::to_string(kMaxDimension) + "]");
  if (!(c.omega > 0.0 && c.omega < 1.0)) throw FormatError("experiment config: omega must lie in (0, 1)");
  if (!(c.kappa > 0.0 && c.kappa < 1.0)) throw FormatError("experiment config: kappa must lie in (0, 1)");
  if (c.M < 1) throw FormatError("experiment config: M must be at least 1");
  if (c.radius < 2 || c.radius % 2) throw FormatError("experiment config: radius must be even and >= 2");
  if (!(c.epsilon > 0.0)) throw FormatError("experiment config: epsilon must be positive");
  if (c.workers < 1) throw FormatError("experiment config: workers must be at least 1");
  if (c.rowTimeoutSeconds < 0.0) throw FormatError("experiment config: rowTimeoutSeconds must be >= 0");
  try {
    CapacityDistribution::parse(c.distribution);
  } catch (const std::exception& e) {
    throw FormatError(std::string("experiment config: ") + e.what());
  }
  return c;
}

Json ExperimentConfig::toJson() const {
  return Json{{"dims", dims},       {"distribution", distribution},
              {"seeds", seeds},     {"mode", modeName(mode)},
              {"kappa", kappa},     {"M", M},
              {"omega", omega},     {"radius", radius},
              {"epsilon", epsilon}, {"constructive", constructive},
              {"oracle", oracle},   {"rowTimeoutSeconds", rowTimeoutSeconds},
              {"workers", workers}};
}

PipelineParams ExperimentConfig::pipelineParams() const {
  PipelineParams p;
  p.scaling.kappa = kappa;
  p.scaling.M = M;
  p.middle.layer.epsilon = epsilon;
  p.middle.layer.smoothingRadius = radius;
  return p;
}

double median(std::vector<double> values) {
  if (values.empty()) return std::nan("");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

ExperimentRow runRow(const ExperimentConfig& config, int d, std::uint64_t seed) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  Deadline deadline;
  if (config.rowTimeoutSeconds > 0.0)
    deadline = start + std::chrono::duration_cast<Clock::duration>(
                           std::chrono::duration<double>(config.rowTimeoutSeconds));
  ExperimentRow row;
  row.d = d;
  row.distribution = config.distribution;
  row.seed = seed;
  row.mode = config.mode;
  try {
    const CubeTopology topo(d);
    const CapacityNetwork net = sample(CapacityDistribution::parse(config.distribution), topo, seed);
    const BoundReport bound = upperBounds(net, config.mode == PairMode::Opp ? PairSet::opp() : PairSet::all());
    row.cAv = bound.cAv;
    row.upperBound = bound.bound;
    if (config.constructive) {
      SolveOptions so;
      so.deadline = deadline;
      const UniformFlowSolution sol = solveUniform(net, config.mode, config.pipelineParams(), so);
      row.phiConstructive = sol.phi;
      row.demandRatio = sol.demandRatio;
      row.auditPassed = sol.auditPassed;
      row.commodityFailures = static_cast<int>(sol.failures.size());
    }
    if (config.oracle) {
      ConcurrentOptions co;
      co.omega = config.omega;
      co.deadline = deadline;
      try {
        const ConcurrentResult orc =
            maxConcurrentUniform(net, config.mode == PairMode::Opp ? PairSet::opp() : PairSet::all(), co);
        row.phiOracle = orc.phi;
        row.oracleDual = orc.upperBound;
        row.oracleIterations = orc.iterations;
      } catch (const BudgetError& e) {
        row.status = "budget";
        row.message = e.what();
      }
    }
  } catch (const DeadlineExceeded& e) {
    row.status = "timeout";
    row.message = e.what();
  } catch (const OracleTimeout& e) {
    row.status = "timeout";
    row.message = e.what();
  } catch (const std::exception& e) {
    row.status = "error";
    row.message = e.what();
  }
  constexpr double tol = 1e-9;
  const double cap = row.upperBound * (1.0 + tol);
  if (row.phiConstructive && *row.phiConstructive > cap) row.consistent = false;
  if (row.phiOracle) {
    const double dominated = *row.phiOracle / (1.0 - config.omega) + tol;
    if (*row.phiOracle > cap) row.consistent = false;
    if (row.phiConstructive && *row.phiConstructive > dominated) row.consistent = false;
  }
  row.wallTime = std::chrono::duration<double>(Clock::now() - start).count();
  return row;
}

ExperimentReport runExperiment(const ExperimentConfig& config) {
  ExperimentReport report;
  report.config = config;
  std::vector<int> dims = config.dims;
  std::sort(dims.begin(), dims.end());
  dims.erase(std::unique(dims.begin(), dims.end()), dims.end());
  std::vector<std::uint64_t> seeds = config.seeds;
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());

  std::vector<std::pair<int, std::uint64_t>> jobs;
  for (int d : dims)
    for (std::uint64_t s : seeds) jobs.emplace_back(d, s);
  report.rows.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++)
      report.rows[i] = runRow(config, jobs[i].first, jobs[i].second);
  };
  const int threads = std::min<int>(config.workers, static_cast<int>(jobs.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  for (int d : dims) {
    DimensionSummary s;
    s.d = d;
    std::vector<double> cons, orc;
    int failed = 0;
    for (const ExperimentRow& r : report.rows) {
      if (r.d != d) continue;
      ++s.rows;
      if (r.status != "ok" || r.commodityFailures > 0) ++failed;
      if (r.phiConstructive) cons.push_back(*r.phiConstructive);
      if (r.phiOracle) orc.push_back(*r.phiOracle);
    }
    if (!cons.empty()) s.medianConstructive = median(cons);
    if (!orc.empty()) s.medianOracle = median(orc);
    s.failureRate = s.rows ? static_cast<double>(failed) / s.rows : 0.0;
    report.summary.push_back(s);
  }
  return report;
}

namespace {

Json optionalJson(const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); }

}  // namespace

Json ExperimentReport::toJson() const {
  Json j;
  j["schemaVersion"] = kSchemaVersion;
  j["manifest"] = {{"parameters", config.toJson()},
                   {"codeVersion", kCodeVersion},
                   {"generatorVersion", kGeneratorVersion},
                   {"rngScheme", "splitmix64 counter hash keyed by (seed, stream tag, canonical edge index)"}};
  Json rs = Json::array();
  for (const ExperimentRow& r : rows)
    rs.push_back({{"d", r.d},
                  {"distribution", r.distribution},
                  {"seed", r.seed},
                  {"mode", modeName(r.mode)},
                  {"status", r.status},
                  {"message", r.message},
                  {"phiConstructive", optionalJson(r.phiConstructive)},
                  {"phiOracle", optionalJson(r.phiOracle)},
                  {"oracleDual", optionalJson(r.oracleDual)},
                  {"upperBound", r.upperBound},
                  {"cAv", r.cAv},
                  {"audits",
                   {{"demandRatio", r.demandRatio},
                    {"auditPassed", r.auditPassed},
                    {"commodityFailures", r.commodityFailures}}},
                  {"oracleIterations", r.oracleIterations},
                  {"consistent", r.consistent},
                  {"wallTime", r.wallTime}});
  j["rows"] = std::move(rs);
  Json sm = Json::array();
  for (const DimensionSummary& s : summary)
    sm.push_back({{"d", s.d},
                  {"rows", s.rows},
                  {"medianConstructive", optionalJson(s.medianConstructive)},
                  {"medianOracle", optionalJson(s.medianOracle)},
                  {"failureRate", s.failureRate}});
  j["summary"] = std::move(sm);
  return j;
}

std::string ExperimentReport::toCsv() const {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "d,distribution,seed,mode,status,phiConstructive,phiOracle,oracleDual,upperBound,cAv,"
         "demandRatio,auditPassed,commodityFailures,oracleIterations,consistent,wallTime\n";
  auto opt = [&](const std::optional<double>& x) {
    if (x) out << *x;
  };
  for (const ExperimentRow& r : rows) {
    out << r.d << ",\"" << r.distribution << "\"," << r.seed << ',' << modeName(r.mode) << ',' << r.status << ',';
    opt(r.phiConstructive);
    out << ',';
    opt(r.phiOracle);
    out << ',';
    opt(r.oracleDual);
    out << ',' << r.upperBound << ',' << r.cAv << ',' << r.demandRatio << ',' << r.auditPassed << ','
        << r.commodityFailures << ',' << r.oracleIterations << ',' << r.consistent << ',' << r.wallTime << '\n';
  }
  return out.str();
}

}  // namespace hcflow
