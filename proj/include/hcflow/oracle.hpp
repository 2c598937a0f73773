#pragma once

#include <Eigen/Core>
#include <chrono>
#include <optional>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hcflow/capacities.hpp"
#include "hcflow/flowcore.hpp"
#include "hcflow/hypercube.hpp"
#include "hcflow/netscale.hpp"

namespace hcflow {

using VertexPair = std::pair<Vertex, Vertex>;

struct PairSet {
  enum class Kind { Opp, All, Custom };
  Kind kind = Kind::Opp;
  std::vector<VertexPair> custom;

  static PairSet opp() { return {Kind::Opp, {}}; }
  static PairSet all() { return {Kind::All, {}}; }
  static PairSet of(std::vector<VertexPair> pairs) { return {Kind::Custom, std::move(pairs)}; }

  // unordered pairs, each once
  std::vector<VertexPair> enumerate(const CubeTopology& topo) const;
};

struct BoundReport {
  double cAv = 0.0;
  double oppBound = 0.0;     // c_av
  double allBound = 0.0;     // c_av / 2^{d-1}
  double distanceSum = 0.0;  // sum of d(u, v) over the requested pairs
  double bound = 0.0;        // sum c_e / distanceSum for the requested pairs
};

// phi sum d(u, v) <= sum c_e for any uniform flow on the pair set.
BoundReport upperBounds(const CapacityNetwork& base, const PairSet& pairs);

struct MaxFlowResult {
  double value = 0.0;
  DirectedFlow flow;
  std::vector<Vertex> sourceSide;  // vertices reachable from s in the residual graph
  double cutCapacity = 0.0;
};

// Dinic on the two-arc expansion of every edge.
MaxFlowResult maxFlowSingle(const CubeTopology& topo, const Eigen::VectorXd& cap, Vertex s, Vertex t);
MaxFlowResult maxFlowSingle(const CapacityNetwork& net, Vertex s, Vertex t);
MaxFlowResult maxFlowSingle(const ScaledNetwork& net, Vertex s, Vertex t);

class BudgetError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline constexpr int kOracleOppMaxDim = 11;
inline constexpr int kOracleAllMaxDim = 7;
inline constexpr std::size_t kOracleCustomMaxPairs = 8192;

struct ConcurrentOptions {
  double omega = 0.02;
  int maxIterations = 20000;
  bool keepFlows = false;
  std::optional<std::chrono::steady_clock::time_point> deadline;  // throws OracleTimeout
  double timeLimitSeconds = 0.0;  // soft: stop with the best certified flow, converged = false
};

class OracleTimeout : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SparseCommodity {
  Vertex u = 0;
  Vertex v = 0;
  std::vector<std::pair<std::uint32_t, double>> edges;  // (edge index, signed flow), ascending index
};

struct ConcurrentResult {
  double phi = 0.0;         // feasible uniform volume
  double upperBound = 0.0;  // best dual bound seen
  int iterations = 0;
  bool converged = false;
  std::vector<VertexPair> pairs;
  std::vector<SparseCommodity> flows;  // scaled to phi, when requested
};

// Exponential-potential method on path flows: per commodity, mass moves from the longest
// active path to a shortest path under lengths exp(eta c-ratio) / c. Stops once
// phi >= (1 - omega) * upperBound, where upperBound comes from the same lengths.
ConcurrentResult maxConcurrentUniform(const CapacityNetwork& base, const PairSet& pairs,
                                      const ConcurrentOptions& options = {});

DirectedFlow toDirectedFlow(const CubeTopology& topo, const SparseCommodity& c);

}  // namespace hcflow
