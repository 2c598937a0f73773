#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hcflow/escape.hpp"
#include "hcflow/flowcore.hpp"
#include "hcflow/hypercube.hpp"

namespace hcflow {

class ConstructionError : public std::runtime_error {
 public:
  ConstructionError(std::string stage, const std::string& what, double theta = 0.0)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)), theta_(theta) {}
  const std::string& stage() const { return stage_; }
  double theta() const { return theta_; }

 private:
  std::string stage_;
  double theta_;
};

struct LayerCrossParams {
  double epsilon = 0.1;
  double lambda = 0.55;
  int smoothingRadius = 4;
  double pPrimeFraction = 0.8;  // position of p' inside its admissible interval
  std::optional<double> pPrime;
};

struct Thinning {
  double p = 1.0;
  double pPrime = 1.0;
  double delta = 0.0;
};

// p' = lo + fraction (p - lo) with lo = max(p/(1+p), p/(1+eps)); delta from (1-p) = (1-p')(1-delta).
// p = 1 keeps every edge in B' (p' = 1, delta = 0).
Thinning thinningFor(double p, const LayerCrossParams& params);

enum : std::uint8_t { kInBPrime = 1, kInBDelta = 2 };

// Per edge membership bits; an open edge lands in B' alone, B_delta alone, or both, with
// marginals p' and delta. Closed edges get 0.
std::vector<std::uint8_t> thinEdges(const OpenSet& open, const Thinning& th, std::uint64_t seed,
                                    std::uint64_t tag);

struct SmoothResult {
  DirectedFlow flow;
  Eigen::VectorXd theta;     // per vertex
  Eigen::VectorXd received;  // F(z): pulse mass deposited at z
  std::vector<Vertex> skipped;
  double maxEdgeFlow = 0.0;
};

// Spreads psi along B_delta paths that alternate between V_{m-1} and V_m and move away from
// the pulse origin, for r steps. Net outflow of the returned flow is psi + theta everywhere.
SmoothResult smoothPulse(const CubeTopology& topo, const Frame& frame, int m,
                         const std::vector<std::uint8_t>& bDelta, const Eigen::VectorXd& psi, int r,
                         double delta);

struct LayerCrossReport {
  int m = 0;
  Eigen::VectorXd rho, psi, theta, residual;  // per vertex; residual = rho - psi - theta
  double bPrimeVolume = 0.0;
  double achievedVolume = 0.0;
  double muAchieved = 0.0;
  double maxUtilization = 0.0;  // max |f_e| |E_m| / (1 + eps)
  int skipped = 0;
  int outliers = 0;
};

struct LayerCrossResult {
  DirectedFlow flow;
  LayerCrossReport report;
};

// Crossing flow V_{m-1} -> V_m of target volume p (unit-capacity normalisation: an open
// edge in edge-layer m has capacity 1/|E_m|).
LayerCrossResult crossLayer(const CubeTopology& topo, const Frame& frame, int ell, int m,
                            const std::vector<std::uint8_t>& thin, const Thinning& th,
                            const LayerCrossParams& params);

struct ThinnedAtom {
  double value = 1.0;
  Thinning thinning;
  std::vector<std::uint8_t> thin;
};

// One thinned indicator per positive atom of the (discretised) capacity law.
std::vector<ThinnedAtom> thinAtoms(const Eigen::VectorXd& discretizedCap,
                                   const std::vector<Atom>& atoms, const LayerCrossParams& params,
                                   std::uint64_t seed);

struct MiddleParams {
  LayerCrossParams layer;
  bool strictStitch = false;  // throw when the stitch hypothesis fails instead of repairing
};

struct MiddleReport {
  std::vector<LayerCrossReport> layers;  // atom-major
  std::vector<StitchReport> stitches;    // one per atom
  double targetVolume = 0.0;
  double volume = 0.0;
  double mu = 0.0;
  double maxUtilization = 0.0;
  bool hypothesisHeld = true;
};

struct MiddleResult {
  DirectedFlow flow;
  MiddleReport report;
};

// V_ell -> V_{k-ell} flow in the frame, in unit normalisation (target volume sum a_i p_i).
MiddleResult buildMiddle(const CubeTopology& topo, const Frame& frame, int ell,
                         const std::vector<ThinnedAtom>& atoms, const MiddleParams& params);

}  // namespace hcflow
