#include "hcflow/escape.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hcflow {

OpenSet openEdges(const Eigen::VectorXd& cap, double threshold) {
  OpenSet open(static_cast<std::size_t>(cap.size()));
  for (Eigen::Index e = 0; e < cap.size(); ++e)
    open[static_cast<std::size_t>(e)] = cap[e] > 0.0 && cap[e] >= threshold;
  return open;
}

namespace {

bool isOpen(const CubeTopology& topo, const OpenSet& open, Vertex x, int dim) {
  return open[topo.edgeIndex(x, dim)] != 0;
}

std::string criteriaText(std::uint8_t failed) {
  std::string s;
  if (failed & kFailsDegree) s += " 1";
  if (failed & kFailsMatching) s += " 2";
  if (failed & kFailsPaths) s += " 3";
  return s.empty() ? " none" : s;
}

}  // namespace

VertexConnectivity vertexConnectivity(const CubeTopology& topo, const OpenSet& open, Vertex u,
                                      double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("alpha must lie in (0, 1)");
  const int d = topo.dim();
  const double need = alpha * d;
  VertexConnectivity vc;
  vc.matchingCount.assign(d, 0);
  vc.pathCount.assign(d, 0);
  for (int i = 0; i < d; ++i) vc.degree += isOpen(topo, open, u, i);
  int weak = 0;
  for (int i = 0; i < d; ++i) {
    const Vertex v = u ^ (Vertex{1} << i);
    for (int j = 0; j < d; ++j) {
      if (j == i) continue;
      const Vertex w1 = u ^ (Vertex{1} << j);
      const bool middle = isOpen(topo, open, w1, i);
      vc.matchingCount[i] += middle;
      vc.pathCount[i] += middle && isOpen(topo, open, u, j) && isOpen(topo, open, v, j);
    }
    if (vc.matchingCount[i] < need) vc.failed |= kFailsMatching;
    if (vc.pathCount[i] < need) ++weak;
  }
  if (vc.degree < need) vc.failed |= kFailsDegree;
  if (weak > static_cast<int>(std::floor(1.0 / alpha))) vc.failed |= kFailsPaths;
  return vc;
}

std::size_t LocalConnectivityReport::poorlyConnectedCount() const {
  return static_cast<std::size_t>(std::count_if(failed.begin(), failed.end(), [](std::uint8_t f) { return f != 0; }));
}

LocalConnectivityReport classifyLocalConnectivity(const CubeTopology& topo, const OpenSet& open,
                                                  double alpha) {
  LocalConnectivityReport rep;
  rep.alpha = alpha;
  rep.failed.assign(topo.vertexCount(), 0);
  for (Vertex u = 0; u < topo.vertexCount(); ++u) {
    const std::uint8_t f = vertexConnectivity(topo, open, u, alpha).failed;
    rep.failed[u] = f;
    if (f & kFailsDegree) rep.T1.push_back(u);
    if (f & kFailsMatching) rep.T2.push_back(u);
    if (f & kFailsPaths) rep.T3.push_back(u);
  }
  return rep;
}

namespace {

using Route = std::vector<PathFlow>;  // segments summing to a flow of 1/d from x to one neighbour

// S1 edge or the lexicographically first ceil(alpha d) open 3-paths; empty if neither exists
Route directRoute(const CubeTopology& topo, const OpenSet& open, Vertex x, int j, double alpha) {
  const int d = topo.dim();
  const Vertex target = x ^ (Vertex{1} << j);
  if (isOpen(topo, open, x, j)) return {PathFlow{{x, target}, 1.0 / d}};
  const int need = std::max(1, static_cast<int>(std::ceil(alpha * d - 1e-12)));
  Route paths;
  for (int a = 0; a < d && static_cast<int>(paths.size()) < need; ++a) {
    if (a == j) continue;
    const Vertex w1 = x ^ (Vertex{1} << a);
    if (isOpen(topo, open, x, a) && isOpen(topo, open, w1, j) && isOpen(topo, open, target, a))
      paths.push_back(PathFlow{{x, w1, w1 ^ (Vertex{1} << j), target}, 0.0});
  }
  if (static_cast<int>(paths.size()) < need) return {};
  for (PathFlow& p : paths) p.value = 1.0 / (static_cast<double>(d) * need);
  return paths;
}

struct NeighborRoutes {
  std::vector<Route> routes;  // per direction
  std::vector<int> kind;      // 1, 3, 0 for S*, -1 unreachable
};

NeighborRoutes neighborRoutes(const CubeTopology& topo, const OpenSet& open, Vertex x, double alpha) {
  const int d = topo.dim();
  NeighborRoutes nr;
  nr.routes.resize(d);
  nr.kind.assign(d, -1);
  for (int j = 0; j < d; ++j) {
    nr.routes[j] = directRoute(topo, open, x, j, alpha);
    if (!nr.routes[j].empty()) nr.kind[j] = isOpen(topo, open, x, j) ? 1 : 3;
  }
  const int want = std::max(1, static_cast<int>(std::ceil(alpha * d / 2.0 - 1e-12)));
  for (int i = 0; i < d; ++i) {
    if (nr.kind[i] != -1) continue;
    const Vertex v = x ^ (Vertex{1} << i);
    // greedy matching over ascending coordinates: x ~> x^j -> v^j ~> v
    std::vector<std::pair<int, Route>> chosen;
    for (int j = 0; j < d && static_cast<int>(chosen.size()) < want; ++j) {
      if (j == i || nr.kind[j] < 1) continue;
      const Vertex w = x ^ (Vertex{1} << j);
      if (!isOpen(topo, open, w, i)) continue;
      Route back = directRoute(topo, open, v, j, alpha);
      if (back.empty()) continue;
      chosen.emplace_back(j, std::move(back));
    }
    if (static_cast<int>(chosen.size()) < want) continue;
    const double share = 1.0 / want;
    Route route;
    for (auto& [j, back] : chosen) {
      const Vertex w = x ^ (Vertex{1} << j);
      for (const PathFlow& p : nr.routes[j]) route.push_back(PathFlow{p.vertices, p.value * share});
      route.push_back(PathFlow{{w, w ^ (Vertex{1} << i)}, share / d});
      for (const PathFlow& p : back) {
        std::vector<Vertex> rev(p.vertices.rbegin(), p.vertices.rend());
        route.push_back(PathFlow{std::move(rev), p.value * share});
      }
    }
    nr.routes[i] = std::move(route);
    nr.kind[i] = 0;
  }
  return nr;
}

double measuredFactor(const CubeTopology& topo, const DirectedFlow& f, Vertex u, double openCapacity) {
  const Frame frame = Frame::whole(topo, u);
  const Eigen::VectorXd& v = f.signedValues();
  double worst = 0.0;
  for (std::size_t i = 0; i < topo.edgeCount(); ++i) {
    const double use = std::abs(v[static_cast<Eigen::Index>(i)]);
    if (use == 0.0) continue;
    const EdgeId e = topo.edgeAt(i);
    const int m = frame.edgeLayer(e.lower, e.dim);
    worst = std::max(worst, use * static_cast<double>(layerSizes(topo.dim(), m).edges) / openCapacity);
  }
  return worst;
}

}  // namespace

EscapePlan buildNeighborEscape(const CubeTopology& topo, const OpenSet& open, Vertex u, double alpha,
                               double openCapacity) {
  topo.requireVertex(u);
  const VertexConnectivity vc = vertexConnectivity(topo, open, u, alpha);
  if (vc.failed)
    throw EscapeError("vertex " + std::to_string(u) + " is poorly connected (criteria" +
                          criteriaText(vc.failed) + ")",
                      {u});
  const NeighborRoutes nr = neighborRoutes(topo, open, u, alpha);
  EscapePlan plan;
  plan.source = u;
  plan.ell = 1;
  plan.alpha = alpha;
  plan.flow = DirectedFlow(topo);
  for (int j = 0; j < topo.dim(); ++j) {
    const Vertex v = u ^ (Vertex{1} << j);
    switch (nr.kind[j]) {
      case 1: plan.S1.push_back(v); break;
      case 3: plan.S3.push_back(v); break;
      case 0: plan.Sstar.push_back(v); break;
      default:
        throw EscapeError("no escape route from " + std::to_string(u) + " to neighbour " +
                              std::to_string(v),
                          {u});
    }
    for (const PathFlow& p : nr.routes[j]) plan.flow.addPath(p.vertices, p.value);
  }
  plan.M1used = measuredFactor(topo, plan.flow, u, openCapacity);
  plan.Mused = plan.M1used;
  return plan;
}

EscapePlan propagateToShell(const CubeTopology& topo, const OpenSet& open, Vertex u, int ell,
                            double alpha, double openCapacity) {
  topo.requireVertex(u);
  const int d = topo.dim();
  if (ell < 1 || ell > d) throw std::domain_error("shell radius must lie in [1, d]");
  const Frame frame = Frame::whole(topo, u);

  std::vector<Vertex> poor;
  for (int m = 0; m < ell; ++m)
    for (Vertex x : layerVertices(frame, m))
      if (vertexConnectivity(topo, open, x, alpha).failed) poor.push_back(x);
  if (!poor.empty())
    throw EscapeError(std::to_string(poor.size()) + " poorly connected vertex(es) within distance " +
                          std::to_string(ell - 1) + " of " + std::to_string(u),
                      poor);

  EscapePlan plan;
  plan.source = u;
  plan.ell = ell;
  plan.alpha = alpha;
  plan.flow = DirectedFlow(topo);
  DirectedFlow firstStage(topo);
  for (int m = 1; m <= ell; ++m) {
    const std::vector<Vertex> prev = layerVertices(frame, m - 1);
    const double scale = static_cast<double>(d) / ((d - m + 1) * static_cast<double>(prev.size()));
    for (Vertex x : prev) {
      const NeighborRoutes nr = neighborRoutes(topo, open, x, alpha);
      if (m == 1)
        for (int j = 0; j < d; ++j) {
          const Vertex v = x ^ (Vertex{1} << j);
          (nr.kind[j] == 1 ? plan.S1 : nr.kind[j] == 3 ? plan.S3 : plan.Sstar).push_back(v);
        }
      for (int j = 0; j < d; ++j) {
        if (((x ^ u) >> j) & 1u) continue;  // keep only the V_m-bound routes
        if (nr.kind[j] == -1)
          throw EscapeError("no escape route from " + std::to_string(x) + " in direction " +
                                std::to_string(j),
                            {x});
        for (const PathFlow& p : nr.routes[j]) {
          plan.flow.addPath(p.vertices, p.value * scale);
          if (m == 1) firstStage.addPath(p.vertices, p.value * scale);
        }
      }
    }
  }
  plan.M1used = measuredFactor(topo, firstStage, u, openCapacity);
  plan.Mused = measuredFactor(topo, plan.flow, u, openCapacity);
  return plan;
}

std::map<Vertex, std::vector<PathFlow>> shellPaths(const EscapePlan& plan) {
  const CubeTopology& topo = plan.flow.topology();
  const std::vector<Vertex> shell = layerVertices(Frame::whole(topo, plan.source), plan.ell);
  const Decomposition parts = decompose(plan.flow, {plan.source}, shell);
  std::map<Vertex, std::vector<PathFlow>> groups;
  for (const PathFlow& p : parts.paths)
    if (p.vertices.front() == plan.source && popcount(p.vertices.back() ^ plan.source) == plan.ell)
      groups[p.vertices.back()].push_back(p);
  return groups;
}

DirectedFlow subcubeSlice(const CubeTopology& topo, const EscapePlan& plan,
                          const std::map<Vertex, std::vector<PathFlow>>& groups, Vertex v) {
  const Vertex u = plan.source;
  topo.requireVertex(v);
  const int k = popcount(u ^ v);
  if (v == u || k < plan.ell)
    throw std::domain_error("subcube slice needs d(u, v) >= ell");
  const int d = topo.dim();
  const double scale = static_cast<double>(binomial(d, plan.ell)) /
                       (static_cast<double>(binomial(k, plan.ell)) * std::ldexp(1.0, d));
  DirectedFlow out(topo);
  for (Vertex w : boundarySet(topo, u, v, plan.ell)) {
    const auto it = groups.find(w);
    if (it == groups.end()) continue;
    for (const PathFlow& p : it->second) out.addPath(p.vertices, p.value * scale);
  }
  return out;
}

std::map<Vertex, DirectedFlow> splitToSubcubeBoundaries(const EscapePlan& plan,
                                                        const std::vector<Vertex>& targets) {
  const CubeTopology& topo = plan.flow.topology();
  const std::vector<Vertex> shell = layerVertices(Frame::whole(topo, plan.source), plan.ell);
  const BalanceReport b = balanceReport(plan.flow, {plan.source}, shell);
  if (b.interiorImbalance > 1e-9 || b.mu > 1e-9 || std::abs(b.volume - 1.0) > 1e-9)
    throw std::domain_error("escape plan is not a balanced volume-1 flow");
  const auto groups = shellPaths(plan);
  std::map<Vertex, DirectedFlow> out;
  for (Vertex v : targets) out.emplace(v, subcubeSlice(topo, plan, groups, v));
  return out;
}

}  // namespace hcflow
