#include "hcflow/netscale.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace hcflow {

int effectiveEll(int d, const ScalingParams& params) {
  if (params.ellOverride) {
    if (*params.ellOverride < 0 || *params.ellOverride > d)
      throw std::domain_error("ell override out of range");
    return *params.ellOverride;
  }
  if (!(params.kappa > 0.0 && params.kappa < 1.0)) throw std::domain_error("kappa must lie in (0, 1)");
  const int byKappa = static_cast<int>(std::floor(std::pow(static_cast<double>(d), params.kappa) + 1e-12));
  const int byRoom = (d - 5) / 2;
  return std::max(1, std::min(byKappa, d >= 5 ? byRoom : 0));
}

ScaledNetwork ScaledNetwork::antipodal(const CapacityNetwork& base, Vertex u, ScalingParams params) {
  base.topo.requireVertex(u);
  return ScaledNetwork{&base, u, base.topo.antipode(u), Mode::Antipodal, params};
}

ScaledNetwork ScaledNetwork::between(const CapacityNetwork& base, Vertex u, Vertex v,
                                     ScalingParams params) {
  base.topo.requireVertex(u);
  base.topo.requireVertex(v);
  if (u == v) throw std::domain_error("scaled subcube network needs distinct endpoints");
  return ScaledNetwork{&base, u, v, Mode::Subcube, params};
}

double scaledCapacity(const ScaledNetwork& net, EdgeId e) {
  const CubeTopology& topo = net.base->topo;
  const Frame frame = net.frame();
  if (!frame.isFreeDim(e.dim) || !frame.contains(e.lower)) return 0.0;
  const int k = frame.k;
  const int m = frame.edgeLayer(e.lower, e.dim);
  const int ell = net.ell();
  double factor = isBoostedLayer(m, k, ell) ? net.params.M : 1.0;
  if (net.mode == ScaledNetwork::Mode::Subcube) factor *= std::ldexp(1.0, 1 - topo.dim());
  return factor * net.base->capacity(e) / static_cast<double>(layerSizes(k, m).edges);
}

Eigen::VectorXd scaledCapacities(const ScaledNetwork& net) {
  const CubeTopology& topo = net.base->topo;
  Eigen::VectorXd out(static_cast<Eigen::Index>(topo.edgeCount()));
  for (std::size_t i = 0; i < topo.edgeCount(); ++i)
    out[static_cast<Eigen::Index>(i)] = scaledCapacity(net, topo.edgeAt(i));
  return out;
}

AntipodalAudit auditAntipodalSuperposition(const CapacityNetwork& base,
                                           const ScalingParams& params) {
  const CubeTopology& topo = base.topo;
  const int d = topo.dim();
  AntipodalAudit audit;
  audit.ell = effectiveEll(d, params);
  const int ell = audit.ell;
  if (!(ell + 2 < d - ell - 1))
    throw std::domain_error("degenerate ell: need ell + 2 < d - ell - 1 (d=" + std::to_string(d) +
                            ", ell=" + std::to_string(ell) + ")");
  audit.epsD = 2.0 * (params.M - 1.0) * (ell + 2) / d;

  std::vector<double> inv(d + 1, 0.0), boost(d + 1, 0.0);
  for (int m = 1; m <= d; ++m) {
    inv[m] = 1.0 / static_cast<double>(layerSizes(d, m).edges);
    boost[m] = isBoostedLayer(m, d, ell) ? (params.M - 1.0) * inv[m] : 0.0;
  }

  const auto n = static_cast<Eigen::Index>(topo.edgeCount());
  audit.part1.resize(n);
  audit.part2.resize(n);
  audit.demand.resize(n);
  const Vertex vertices = static_cast<Vertex>(topo.vertexCount());
  for (Eigen::Index i = 0; i < n; ++i) {
    const EdgeId e = topo.edgeAt(static_cast<std::size_t>(i));
    const Vertex keep = ~(Vertex{1} << e.dim);
    double s1 = 0.0, s2 = 0.0;
    for (Vertex u = 0; u < vertices; ++u) {
      const int m = popcount((e.lower ^ u) & keep) + 1;
      s1 += inv[m];
      s2 += boost[m];
    }
    const double c = base.cap[i];
    audit.part1[i] = s1 * c;
    audit.part2[i] = s2 * c;
    audit.demand[i] = 0.5 * (s1 + s2) * c;
  }
  return audit;
}

SubcubeAudit auditSubcubeSuperposition(const CapacityNetwork& base, const ScalingParams& params) {
  const CubeTopology& topo = base.topo;
  const int d = topo.dim();
  if (d > kSubcubeAuditMaxDim)
    throw std::domain_error("subcube audit is exhaustive; d must be at most " +
                            std::to_string(kSubcubeAuditMaxDim));
  const int ell = effectiveEll(d, params);
  const double scale = std::ldexp(1.0, 1 - d);

  const auto n = static_cast<Eigen::Index>(topo.edgeCount());
  SubcubeAudit audit;
  audit.allPairs = Eigen::VectorXd::Zero(n);
  audit.farMiddle = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const EdgeId e = topo.edgeAt(static_cast<std::size_t>(i));
    const Vertex bit = Vertex{1} << e.dim;
    const Vertex rest = topo.fullMask() & ~bit;
    double all = 0.0, far = 0.0;
    // free masks F containing the edge's coordinate; u ranges over the 2^k corners
    for (Vertex g = rest;; g = (g - 1) & rest) {
      const Vertex F = g | bit;
      const int k = popcount(F);
      const int ek = pairEll(ell, k);
      const bool farPair = isFarPair(d, k);
      for (Vertex s = F;; s = (s - 1) & F) {
        const int m = popcount((e.lower ^ s) & F & ~bit) + 1;
        const double w = scale / static_cast<double>(layerSizes(k, m).edges);
        all += w;
        if (farPair && m > ek && m <= k - ek) far += w;
        if (s == 0) break;
      }
      if (g == 0) break;
    }
    // each unordered pair was seen from both endpoints
    audit.allPairs[i] = 0.5 * all * base.cap[i];
    audit.farMiddle[i] = 0.5 * far * base.cap[i];
  }
  return audit;
}

}  // namespace hcflow
