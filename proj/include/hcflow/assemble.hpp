#pragma once

#include <Eigen/Core>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hcflow/capacities.hpp"
#include "hcflow/escape.hpp"
#include "hcflow/flowcore.hpp"
#include "hcflow/layercross.hpp"
#include "hcflow/netscale.hpp"

namespace hcflow {

struct PipelineParams {
  ScalingParams scaling;
  MiddleParams middle;
  double alpha = 0.2;
  int alphaRetries = 2;          // retry at alpha/2, alpha/4
  double discretizeEps = 0.05;   // only used for non-finite laws
  std::optional<std::uint64_t> thinSeed;  // defaults to the network seed
  int pairsPerDistance = 64;     // all-pairs sampling for 8 <= d <= 10
};

enum class CommodityKind { Antipodal, Far, Near };

struct CommoditySpec {
  Vertex u = 0;
  Vertex v = 0;
  CommodityKind kind = CommodityKind::Antipodal;
  double targetVolume = 0.0;
};

CommoditySpec classifyPair(const CubeTopology& topo, Vertex u, Vertex v);

struct CommodityResult {
  DirectedFlow flow;  // proper u -> v
  double volume = 0.0;
  double middleVolume = 0.0;  // unit normalisation
  double middleMu = 0.0;
  double finalMu = 0.0;
  double alphaUsed = 0.0;
  double Mused = 0.0;
  bool middleHypothesisHeld = true;
  StitchReport stitch;
};

// Shared, per-network state: truncation, discretisation, thinned atoms and an escape-plan cache.
class Pipeline {
 public:
  Pipeline(const CapacityNetwork& base, PipelineParams params);

  const CapacityNetwork& base() const { return *base_; }
  const PipelineParams& params() const { return params_; }
  int ell() const { return ell_; }
  const Truncation& truncation() const { return truncation_; }
  const std::vector<ThinnedAtom>& atoms() const { return atoms_; }
  double middleTarget() const { return middleTarget_; }

  CommodityResult antipodal(Vertex u);
  CommodityResult farPair(Vertex u, Vertex v);
  CommodityResult nearPair(Vertex u, Vertex v);
  CommodityResult commodity(Vertex u, Vertex v);

  void enableCaching(bool on) { caching_ = on; }

 private:
  struct CachedPlan {
    EscapePlan plan;
    std::map<Vertex, std::vector<PathFlow>> groups;
  };
  CachedPlan& plan(Vertex u, int ell);
  CommodityResult finish(Vertex u, Vertex v, const DirectedFlow& combined, const MiddleReport* middle,
                         double middleVolume);
  CommodityResult farPairCached(Vertex u, Vertex v);

  const CapacityNetwork* base_;
  PipelineParams params_;
  int ell_ = 1;
  Truncation truncation_;
  OpenSet escapeOpen_;
  std::string escapeProblem_;  // set when the law admits no truncation
  std::vector<ThinnedAtom> atoms_;
  double middleTarget_ = 0.0;
  bool caching_ = false;
  std::map<std::pair<Vertex, int>, std::unique_ptr<CachedPlan>> plans_;
  std::map<std::pair<Vertex, Vertex>, CommodityResult> farCache_;
};

CommodityResult buildAntipodal(const CapacityNetwork& base, Vertex u, const PipelineParams& params);
CommodityResult buildFarPair(const CapacityNetwork& base, Vertex u, Vertex v,
                             const PipelineParams& params);
CommodityResult buildNearPair(const CapacityNetwork& base, Vertex u, Vertex v,
                              const PipelineParams& params);

enum class PairMode { Opp, All };

struct CommodityFailure {
  Vertex u = 0;
  Vertex v = 0;
  std::string stage;
  std::string message;
};

struct UniformFlowSolution {
  PairMode mode = PairMode::Opp;
  std::vector<CommoditySpec> commodities;
  std::vector<DirectedFlow> flows;  // final, rescaled; filled when keepFlows
  std::vector<double> rawVolumes;   // per commodity, before uniformisation
  double phi = 0.0;                 // certified uniform volume against raw capacities
  double phiBeforeRescale = 0.0;    // min raw volume
  double demandRatio = 0.0;         // max demand / c_e at phiBeforeRescale
  double budget = 0.0;              // 1 + eps_d + eps (+ near share for all pairs)
  double nearShare = 0.0;           // max near-pair demand / c_e after rescale
  bool auditPassed = false;
  bool sampled = false;             // all-pairs on a sample of pairs
  Eigen::VectorXd edgeUtilization;  // final demand / c_e
  std::vector<CommodityFailure> failures;
  double minMiddleVolume = 0.0;
  double maxMiddleMu = 0.0;
  double maxMused = 0.0;
  int middleHypothesisFailures = 0;
};

class DeadlineExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Deadline = std::optional<std::chrono::steady_clock::time_point>;

struct SolveOptions {
  bool keepFlows = false;
  Deadline deadline;  // checked between commodities
};

UniformFlowSolution solveUniform(const CapacityNetwork& base, PairMode mode,
                                 const PipelineParams& params, const SolveOptions& options = {});

struct PairDesign {
  std::vector<std::pair<Vertex, Vertex>> pairs;
  std::vector<double> weights;  // pairs represented by each sampled pair
  bool sampled = false;
};

// Pairs used for mode=all: every pair for d <= 7, a deterministic sample per distance above.
PairDesign allPairsDesign(const CubeTopology& topo, int perDistance, std::uint64_t seed);

}  // namespace hcflow
