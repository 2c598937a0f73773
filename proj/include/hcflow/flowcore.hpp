#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "hcflow/capacities.hpp"
#include "hcflow/hypercube.hpp"
#include "hcflow/netscale.hpp"

namespace hcflow {

// A flow on the cube edges. One signed value per canonical edge: positive means
// lower -> upper. Antiparallel values cancel on superposition, so at most one
// direction of each edge carries flow.
class DirectedFlow {
 public:
  DirectedFlow() : topo_(1), values_(Eigen::VectorXd::Zero(1)) {}
  explicit DirectedFlow(const CubeTopology& topo)
      : topo_(topo), values_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(topo.edgeCount()))) {}
  DirectedFlow(const CubeTopology& topo, Eigen::VectorXd signedValues);

  const CubeTopology& topology() const { return topo_; }
  const Eigen::VectorXd& signedValues() const { return values_; }
  Eigen::VectorXd& signedValues() { return values_; }

  // f(from -> to) >= 0
  double along(Vertex from, Vertex to) const;
  // adds `amount` on from -> to (negative amounts push the other way)
  void add(Vertex from, Vertex to, double amount);
  void addPath(const std::vector<Vertex>& path, double amount);

  // per undirected edge |f|
  Eigen::VectorXd usage() const { return values_.cwiseAbs(); }
  bool isZero() const { return values_.isZero(0.0); }

  DirectedFlow reversed() const { return DirectedFlow(topo_, -values_); }
  DirectedFlow& operator+=(const DirectedFlow& other);
  DirectedFlow& operator-=(const DirectedFlow& other);
  DirectedFlow& operator*=(double s) {
    values_ *= s;
    return *this;
  }
  friend DirectedFlow operator+(DirectedFlow a, const DirectedFlow& b) { return a += b; }
  friend DirectedFlow operator-(DirectedFlow a, const DirectedFlow& b) { return a -= b; }
  friend DirectedFlow operator*(DirectedFlow a, double s) { return a *= s; }
  friend DirectedFlow operator*(double s, DirectedFlow a) { return a *= s; }

 private:
  CubeTopology topo_;
  Eigen::VectorXd values_;
};

double netOutflow(const DirectedFlow& f, Vertex x);
// f+ for every vertex
Eigen::VectorXd netOutflows(const DirectedFlow& f);
// compensated sum of all net outflows; zero up to rounding for every flow
double conservationResidual(const DirectedFlow& f);
// 1/2 sum |f+(v)|
double flowSize(const DirectedFlow& f);

struct FeasibilityReport {
  bool feasible = true;
  double maxRatio = 0.0;    // max |f_e| / cap_e over edges with flow (inf on a closed edge)
  double worstExcess = 0.0;  // max |f_e| - cap_e
  std::optional<EdgeId> worstEdge;
};

FeasibilityReport checkFeasible(const DirectedFlow& f, const Eigen::VectorXd& cap, double tol);
FeasibilityReport checkFeasible(const DirectedFlow& f, const CapacityNetwork& net, double tol);
FeasibilityReport checkFeasible(const DirectedFlow& f, const ScaledNetwork& net, double tol);

struct BalanceReport {
  double size = 0.0;
  double volume = 0.0;
  double interiorImbalance = 0.0;
  double boundaryDeviation = 0.0;
  double mu = 0.0;
};

BalanceReport balanceReport(const DirectedFlow& f, const std::vector<Vertex>& S,
                            const std::vector<Vertex>& T);

struct PathFlow {
  std::vector<Vertex> vertices;  // a cycle lists each vertex once; the closing edge is implied
  double value = 0.0;
};

struct Decomposition {
  std::vector<PathFlow> paths;
  std::vector<PathFlow> cycles;
  double residual = 0.0;  // mass dropped below the numerical zero (reported, never silently large)
};

// Paths from positive to negative net-outflow vertices, then cycles. Works on any flow.
Decomposition decomposeByExcess(const DirectedFlow& f);

// S -> T decomposition of a proper flow; throws when the flow is improper.
Decomposition decompose(const DirectedFlow& f, const std::vector<Vertex>& S,
                        const std::vector<Vertex>& T);

DirectedFlow recombine(const CubeTopology& topo, const Decomposition& parts);

struct StitchReport {
  double size = 0.0;              // size of the input
  double interiorImbalance = 0.0;  // of the input
  double boundaryDeviation = 0.0;  // of the input
  double thetaMeasured = 0.0;      // max of the two ratios to size
  bool hypothesisHeld = false;
  double volume = 0.0;     // of the output
  double deviation = 0.0;  // boundary deviation of the output
  double deletedMass = 0.0;
};

struct StitchResult {
  DirectedFlow flow;
  StitchReport report;
};

inline constexpr double kProperTolerance = 1e-9;

// Super-source/super-sink repair: keep only the S -> T paths (and cycles) of the
// augmented decomposition. Requires theta < 1/9 and both hypothesis inequalities.
StitchResult stitch(const DirectedFlow& f, const std::vector<Vertex>& S,
                    const std::vector<Vertex>& T, double theta);

// The same repair without the hypothesis check. Output is proper and dominated by f;
// the volume and deviation guarantees of stitch only apply when the report says so.
StitchResult repairStitch(const DirectedFlow& f, const std::vector<Vertex>& S,
                          const std::vector<Vertex>& T);

}  // namespace hcflow
