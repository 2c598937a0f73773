#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <optional>

#include "hcflow/capacities.hpp"
#include "hcflow/hypercube.hpp"

namespace hcflow {

struct ScalingParams {
  double kappa = 0.6;
  double M = 7.0;
  std::optional<int> ellOverride;
};

// ell = override, else max(1, min(floor(d^kappa), floor((d-5)/2)))
int effectiveEll(int d, const ScalingParams& params);

// true when edge-layer m (1..k) gets the factor M
inline bool isBoostedLayer(int m, int k, int ell) { return m <= ell + 2 || m >= k - ell - 1; }

struct ScaledNetwork {
  enum class Mode { Antipodal, Subcube };

  const CapacityNetwork* base = nullptr;
  Vertex source = 0;
  Vertex sink = 0;
  Mode mode = Mode::Antipodal;
  ScalingParams params;

  static ScaledNetwork antipodal(const CapacityNetwork& base, Vertex u, ScalingParams params);
  static ScaledNetwork between(const CapacityNetwork& base, Vertex u, Vertex v,
                               ScalingParams params);

  Frame frame() const { return Frame::between(source, sink); }
  int ell() const { return effectiveEll(base->topo.dim(), params); }
};

double scaledCapacity(const ScaledNetwork& net, EdgeId e);

// Scaled capacities of every canonical edge (zero outside the subcube).
Eigen::VectorXd scaledCapacities(const ScaledNetwork& net);

struct AntipodalAudit {
  int ell = 0;
  double epsD = 0.0;
  Eigen::VectorXd demand;  // half the sum over all sources of the scaled capacity
  Eigen::VectorXd part1;   // sum over sources of c_e / |E_m|
  Eigen::VectorXd part2;   // sum over sources of (M - 1) c_e / |E_m| on boosted layers
};

AntipodalAudit auditAntipodalSuperposition(const CapacityNetwork& base,
                                           const ScalingParams& params);

struct SubcubeAudit {
  // all unordered pairs, all layers, factor 1: equals c_e
  Eigen::VectorXd allPairs;
  // far pairs (distance > d/4), middle layers only, factor 1
  Eigen::VectorXd farMiddle;
};

inline constexpr int kSubcubeAuditMaxDim = 10;

SubcubeAudit auditSubcubeSuperposition(const CapacityNetwork& base, const ScalingParams& params);

// Radius used for a pair at distance k: min(ell, floor(k/2)).
inline int pairEll(int ell, int k) { return std::min(ell, k / 2); }

inline bool isFarPair(int d, int k) { return 4 * k > d; }

}  // namespace hcflow
