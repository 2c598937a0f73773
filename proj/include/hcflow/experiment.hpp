#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hcflow/assemble.hpp"
#include "hcflow/io.hpp"
#include "hcflow/oracle.hpp"

namespace hcflow {

inline constexpr const char* kCodeVersion = "hcflow 0.1.0";

struct ExperimentConfig {
  std::vector<int> dims;
  std::string distribution = "bernoulli:0.75";
  std::vector<std::uint64_t> seeds;
  PairMode mode = PairMode::Opp;
  double kappa = 0.6;
  int M = 7;
  double omega = 0.02;
  int radius = 4;
  double epsilon = 0.1;
  bool constructive = true;
  bool oracle = true;
  double rowTimeoutSeconds = 0.0;  // 0: no limit
  int workers = 1;

  // unknown keys and wrong types are errors
  static ExperimentConfig fromJson(const Json& j);
  Json toJson() const;
  PipelineParams pipelineParams() const;
};

struct ExperimentRow {
  int d = 0;
  std::string distribution;
  std::uint64_t seed = 0;
  PairMode mode = PairMode::Opp;
  std::string status = "ok";  // ok, timeout, error, budget
  std::string message;
  std::optional<double> phiConstructive;
  std::optional<double> phiOracle;
  std::optional<double> oracleDual;
  double upperBound = 0.0;
  double cAv = 0.0;
  double demandRatio = 0.0;
  bool auditPassed = false;
  int commodityFailures = 0;
  int oracleIterations = 0;
  bool consistent = true;  // phiConstructive <= phiOracle/(1-omega) + tol <= upperBound (1 + tol)
  double wallTime = 0.0;
};

struct DimensionSummary {
  int d = 0;
  int rows = 0;
  std::optional<double> medianConstructive;
  std::optional<double> medianOracle;
  double failureRate = 0.0;  // rows not ok, or with commodity failures
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<ExperimentRow> rows;  // ordered by (d, seed)
  std::vector<DimensionSummary> summary;

  Json toJson() const;
  std::string toCsv() const;
};

ExperimentRow runRow(const ExperimentConfig& config, int d, std::uint64_t seed);
ExperimentReport runExperiment(const ExperimentConfig& config);

double median(std::vector<double> values);

}  // namespace hcflow
