#include "hcflow/layercross.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "hcflow/rng.hpp"

namespace hcflow {

Thinning thinningFor(double p, const LayerCrossParams& params) {
  if (!(p > 0.0 && p <= 1.0)) throw std::domain_error("thinning needs 0 < p <= 1");
  if (!(params.epsilon > 0.0)) throw std::domain_error("epsilon must be positive");
  if (p == 1.0) return Thinning{1.0, 1.0, 0.0};
  const double lo = std::max(p / (1.0 + p), p / (1.0 + params.epsilon));
  double pp = params.pPrime ? *params.pPrime : lo + params.pPrimeFraction * (p - lo);
  if (!(pp >= lo - 1e-15 && pp < p))
    throw std::domain_error("p' must satisfy max{p/(1+p), p/(1+eps)} <= p' < p");
  const double delta = 1.0 - (1.0 - p) / (1.0 - pp);
  return Thinning{p, pp, delta};
}

std::vector<std::uint8_t> thinEdges(const OpenSet& open, const Thinning& th, std::uint64_t seed,
                                    std::uint64_t tag) {
  std::vector<std::uint8_t> out(open.size(), 0);
  // conditional on being open: B' only, both, B_delta only
  const double onlyPrime = th.pPrime * (1.0 - th.delta) / th.p;
  const double both = th.pPrime * th.delta / th.p;
  const std::uint64_t stream = kThinStream ^ splitmix64(tag);
  for (std::size_t e = 0; e < open.size(); ++e) {
    if (!open[e]) continue;
    const double u = counterUniform(seed, stream, e);
    if (u < onlyPrime)
      out[e] = kInBPrime;
    else if (u < onlyPrime + both)
      out[e] = kInBPrime | kInBDelta;
    else
      out[e] = kInBDelta;
  }
  return out;
}

namespace {

// dims that move x from its layer to the other layer of the pair (m-1, m)
template <typename Fn>
void forCrossingDims(const Frame& frame, int m, Vertex x, Fn&& fn) {
  const Vertex rel = (x ^ frame.origin) & frame.freeMask;
  const bool upper = popcount(rel) == m;
  for (Vertex bits = upper ? rel : (frame.freeMask & ~rel); bits; bits &= bits - 1)
    fn(std::countr_zero(bits));
}

}  // namespace

SmoothResult smoothPulse(const CubeTopology& topo, const Frame& frame, int m,
                         const std::vector<std::uint8_t>& bDelta, const Eigen::VectorXd& psi, int r,
                         double delta) {
  if (r < 2 || r % 2 != 0) throw std::domain_error("smoothing radius must be even and at least 2");
  if (m < 1 || m > frame.k) throw std::domain_error("layer out of range");
  const auto nv = static_cast<Eigen::Index>(topo.vertexCount());
  SmoothResult res;
  res.flow = DirectedFlow(topo);
  res.theta = Eigen::VectorXd::Zero(nv);
  res.received = Eigen::VectorXd::Zero(nv);
  Eigen::VectorXd& fv = res.flow.signedValues();

  auto inB = [&](Vertex y, int dim) { return (bDelta[topo.edgeIndex(y, dim)] & kInBDelta) != 0; };

  std::vector<Vertex> sideVertices = layerVertices(frame, m - 1);
  {
    const auto top = layerVertices(frame, m);
    sideVertices.insert(sideVertices.end(), top.begin(), top.end());
  }

  std::unordered_map<Vertex, double> frontier, next;
  for (Vertex x : sideVertices) {
    const double a = psi[x];
    if (a == 0.0) continue;
    const bool upper = frame.layerOf(x) == m;
    const int sideDeg = upper ? m : frame.k - m + 1;
    int deg = 0;
    forCrossingDims(frame, m, x, [&](int dim) { deg += inB(x, dim); });
    if (deg == 0 || deg < delta * sideDeg / 2.0) {
      res.skipped.push_back(x);
      res.theta[x] -= a;
      continue;
    }
    frontier.clear();
    frontier.emplace(x, a);
    for (int step = 0; step < r && !frontier.empty(); ++step) {
      next.clear();
      for (const auto& [y, w] : frontier) {
        const Vertex away = ~(x ^ y);
        int count = 0;
        forCrossingDims(frame, m, y, [&](int dim) { count += ((away >> dim) & 1u) && inB(y, dim); });
        if (count == 0) {
          res.received[y] += w;  // dead end keeps the mass
          continue;
        }
        const double share = w / count;
        forCrossingDims(frame, m, y, [&](int dim) {
          if (!((away >> dim) & 1u) || !inB(y, dim)) return;
          const Vertex z = y ^ (Vertex{1} << dim);
          const auto idx = static_cast<Eigen::Index>(topo.edgeIndex(y, dim));
          fv[idx] += ((y >> dim) & 1u) ? -share : share;
          next[z] += share;
        });
      }
      std::swap(frontier, next);
    }
    for (const auto& [z, w] : frontier) res.received[z] += w;
  }
  res.theta -= res.received;
  res.maxEdgeFlow = fv.size() ? fv.cwiseAbs().maxCoeff() : 0.0;
  return res;
}

LayerCrossResult crossLayer(const CubeTopology& topo, const Frame& frame, int ell, int m,
                            const std::vector<std::uint8_t>& thin, const Thinning& th,
                            const LayerCrossParams& params) {
  const int k = frame.k;
  if (m < ell + 1 || m > k - ell)
    throw std::domain_error("layer " + std::to_string(m) + " is outside the middle region [" +
                            std::to_string(ell + 1) + ", " + std::to_string(k - ell) + "]");
  if (!(params.lambda > 0.5)) throw std::domain_error("lambda must exceed 1/2");
  const int d = topo.dim();
  const double Em = static_cast<double>(layerSizes(k, m).edges);
  const double Vlow = static_cast<double>(binomial(k, m - 1));
  const double Vhigh = static_cast<double>(binomial(k, m));
  const double edgeFlow = th.p / th.pPrime / Em;
  const double outlierBand = std::pow(static_cast<double>(d), params.lambda);

  const auto nv = static_cast<Eigen::Index>(topo.vertexCount());
  LayerCrossResult res;
  res.flow = DirectedFlow(topo);
  LayerCrossReport& rep = res.report;
  rep.m = m;
  rep.rho = Eigen::VectorXd::Zero(nv);
  rep.psi = Eigen::VectorXd::Zero(nv);

  const std::vector<Vertex> low = layerVertices(frame, m - 1);
  const std::vector<Vertex> high = layerVertices(frame, m);
  std::vector<int> dPrime(topo.vertexCount(), 0);
  Eigen::VectorXd& fv = res.flow.signedValues();
  int bPrimeEdges = 0;
  for (Vertex x : high) {
    forCrossingDims(frame, m, x, [&](int dim) {
      const std::size_t idx = topo.edgeIndex(x, dim);
      if (!(thin[idx] & kInBPrime)) return;
      const Vertex y = x ^ (Vertex{1} << dim);  // y in V_{m-1}, flow y -> x
      fv[static_cast<Eigen::Index>(idx)] += ((y >> dim) & 1u) ? -edgeFlow : edgeFlow;
      ++dPrime[x];
      ++dPrime[y];
      ++bPrimeEdges;
    });
  }
  if (bPrimeEdges == 0) throw ConstructionError("layercross", "no capacity in layer " + std::to_string(m));
  rep.bPrimeVolume = bPrimeEdges * edgeFlow;

  // rho = wanted net outflow minus actual; psi recentres it over non-outliers per side
  auto recentre = [&](const std::vector<Vertex>& side, bool upper) {
    const int sideDeg = upper ? m : k - m + 1;
    double sum = 0.0;
    int count = 0;
    for (Vertex x : side) {
      const double flowAt = dPrime[x] * edgeFlow;
      rep.rho[x] = upper ? flowAt - th.p / Vhigh : th.p / Vlow - flowAt;
      if (std::abs(dPrime[x] - th.pPrime * sideDeg) > outlierBand) {
        ++rep.outliers;
        continue;
      }
      sum += rep.rho[x];
      ++count;
    }
    const double mean = count ? sum / count : 0.0;
    for (Vertex x : side)
      if (std::abs(dPrime[x] - th.pPrime * sideDeg) <= outlierBand) rep.psi[x] = rep.rho[x] - mean;
  };
  recentre(low, false);
  recentre(high, true);

  if (th.delta > 0.0 && !rep.psi.isZero(0.0)) {
    SmoothResult sm = smoothPulse(topo, frame, m, thin, rep.psi, params.smoothingRadius, th.delta);
    res.flow += sm.flow;
    rep.theta = std::move(sm.theta);
    rep.skipped = static_cast<int>(sm.skipped.size());
  } else {
    rep.theta = -rep.psi;  // nothing to smooth with
  }
  rep.residual = rep.rho - rep.psi - rep.theta;

  const BalanceReport b = balanceReport(res.flow, low, high);
  rep.achievedVolume = b.volume;
  rep.muAchieved = b.mu;
  rep.maxUtilization = fv.cwiseAbs().maxCoeff() * Em / (1.0 + params.epsilon);
  return res;
}

std::vector<ThinnedAtom> thinAtoms(const Eigen::VectorXd& discretizedCap,
                                   const std::vector<Atom>& atoms, const LayerCrossParams& params,
                                   std::uint64_t seed) {
  std::vector<ThinnedAtom> out;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const Atom& a = atoms[i];
    if (!(a.value > 0.0) || !(a.prob > 0.0)) continue;
    OpenSet open(static_cast<std::size_t>(discretizedCap.size()));
    for (Eigen::Index e = 0; e < discretizedCap.size(); ++e)
      open[static_cast<std::size_t>(e)] = discretizedCap[e] == a.value;
    ThinnedAtom t;
    t.value = a.value;
    t.thinning = thinningFor(a.prob, params);
    t.thin = thinEdges(open, t.thinning, seed, i);
    out.push_back(std::move(t));
  }
  return out;
}

MiddleResult buildMiddle(const CubeTopology& topo, const Frame& frame, int ell,
                         const std::vector<ThinnedAtom>& atoms, const MiddleParams& params) {
  const int k = frame.k;
  if (ell + 1 > k - ell) throw std::domain_error("middle region is empty");
  if (atoms.empty()) throw ConstructionError("middle", "capacity law has no positive atom");
  const std::vector<Vertex> S = layerVertices(frame, ell);
  const std::vector<Vertex> T = layerVertices(frame, k - ell);

  MiddleResult res;
  res.flow = DirectedFlow(topo);
  MiddleReport& rep = res.report;
  for (const ThinnedAtom& atom : atoms) {
    rep.targetVolume += atom.value * atom.thinning.p;
    DirectedFlow layered(topo);
    for (int m = ell + 1; m <= k - ell; ++m) {
      LayerCrossResult lc = crossLayer(topo, frame, ell, m, atom.thin, atom.thinning, params.layer);
      layered += lc.flow;
      rep.maxUtilization = std::max(rep.maxUtilization, lc.report.maxUtilization * atom.value);
      rep.layers.push_back(std::move(lc.report));
    }
    const BalanceReport before = balanceReport(layered, S, T);
    const double theta = before.size > 0.0
                             ? std::max(before.interiorImbalance, before.boundaryDeviation) / before.size
                             : 0.0;
    StitchResult st;
    if (theta < 1.0 / 9.0) {
      st = stitch(layered, S, T, theta);
    } else if (params.strictStitch) {
      throw ConstructionError("middle", "stitch hypothesis violated, measured theta " + std::to_string(theta),
                              theta);
    } else {
      st = repairStitch(layered, S, T);
      rep.hypothesisHeld = false;
    }
    rep.stitches.push_back(st.report);
    res.flow += st.flow * atom.value;
  }
  const BalanceReport b = balanceReport(res.flow, S, T);
  rep.volume = b.volume;
  rep.mu = b.mu;
  return res;
}

}  // namespace hcflow
