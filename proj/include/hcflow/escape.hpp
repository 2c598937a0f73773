#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "hcflow/flowcore.hpp"
#include "hcflow/hypercube.hpp"

namespace hcflow {

// open[e] != 0 when canonical edge e is usable
using OpenSet = std::vector<std::uint8_t>;

OpenSet openEdges(const Eigen::VectorXd& cap, double threshold);

enum : std::uint8_t { kFailsDegree = 1, kFailsMatching = 2, kFailsPaths = 4 };

struct VertexConnectivity {
  int degree = 0;
  std::vector<int> matchingCount;  // per neighbour direction: open edges among the d-1 canonical pairs
  std::vector<int> pathCount;      // per neighbour direction: fully open 3-paths
  std::uint8_t failed = 0;
};

VertexConnectivity vertexConnectivity(const CubeTopology& topo, const OpenSet& open, Vertex u,
                                      double alpha);

struct LocalConnectivityReport {
  double alpha = 0.0;
  std::vector<std::uint8_t> failed;  // per vertex, bit set of the violated criteria
  std::vector<Vertex> T1, T2, T3;

  bool ok(Vertex x) const { return failed[x] == 0; }
  std::size_t poorlyConnectedCount() const;
  double poorlyConnectedFraction() const {
    return failed.empty() ? 0.0 : static_cast<double>(poorlyConnectedCount()) / failed.size();
  }
};

LocalConnectivityReport classifyLocalConnectivity(const CubeTopology& topo, const OpenSet& open,
                                                  double alpha);

struct EscapePlan {
  Vertex source = 0;
  int ell = 1;
  double alpha = 0.0;
  std::vector<Vertex> S1, S3, Sstar;  // neighbour partition at the source
  DirectedFlow flow;                 // balanced, volume 1, source -> V_ell(source)
  double M1used = 0.0;               // measured factor of the neighbour stage
  double Mused = 0.0;                // measured max of usage |E_m| / c_e
};

class EscapeError : public std::runtime_error {
 public:
  EscapeError(const std::string& what, std::vector<Vertex> vertices)
      : std::runtime_error(what), vertices_(std::move(vertices)) {}
  const std::vector<Vertex>& vertices() const { return vertices_; }

 private:
  std::vector<Vertex> vertices_;
};

// Volume-1 balanced flow from u to all d neighbours; capacity c on open edges is used
// only for the measured factors.
EscapePlan buildNeighborEscape(const CubeTopology& topo, const OpenSet& open, Vertex u,
                               double alpha, double openCapacity = 1.0);

// Volume-1 balanced flow from u onto V_ell(u), composed layer by layer.
EscapePlan propagateToShell(const CubeTopology& topo, const OpenSet& open, Vertex u, int ell,
                            double alpha, double openCapacity = 1.0);

// Per shell vertex w, the paths of the plan that end at w (each group has volume 1/|V_ell|).
std::map<Vertex, std::vector<PathFlow>> shellPaths(const EscapePlan& plan);

// For each target v: balanced flow u -> S_u(v) of volume 2^{-d}.
std::map<Vertex, DirectedFlow> splitToSubcubeBoundaries(const EscapePlan& plan,
                                                        const std::vector<Vertex>& targets);

// Same as above, from a precomputed shell grouping.
DirectedFlow subcubeSlice(const CubeTopology& topo, const EscapePlan& plan,
                          const std::map<Vertex, std::vector<PathFlow>>& groups, Vertex v);

}  // namespace hcflow
