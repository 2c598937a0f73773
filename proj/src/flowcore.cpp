#include "hcflow/flowcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace hcflow {

DirectedFlow::DirectedFlow(const CubeTopology& topo, Eigen::VectorXd signedValues)
    : topo_(topo), values_(std::move(signedValues)) {
  if (static_cast<std::size_t>(values_.size()) != topo_.edgeCount())
    throw std::invalid_argument("flow vector length does not match the cube");
}

double DirectedFlow::along(Vertex from, Vertex to) const {
  const EdgeId e = topo_.edgeBetween(from, to);
  const double v = values_[static_cast<Eigen::Index>(topo_.edgeIndex(e))];
  return from == e.lower ? std::max(v, 0.0) : std::max(-v, 0.0);
}

void DirectedFlow::add(Vertex from, Vertex to, double amount) {
  const EdgeId e = topo_.edgeBetween(from, to);
  values_[static_cast<Eigen::Index>(topo_.edgeIndex(e))] += from == e.lower ? amount : -amount;
}

void DirectedFlow::addPath(const std::vector<Vertex>& path, double amount) {
  for (std::size_t i = 0; i + 1 < path.size(); ++i) add(path[i], path[i + 1], amount);
}

DirectedFlow& DirectedFlow::operator+=(const DirectedFlow& other) {
  if (!(other.topo_ == topo_)) throw std::invalid_argument("flows live on different cubes");
  values_ += other.values_;
  return *this;
}

DirectedFlow& DirectedFlow::operator-=(const DirectedFlow& other) {
  if (!(other.topo_ == topo_)) throw std::invalid_argument("flows live on different cubes");
  values_ -= other.values_;
  return *this;
}

double netOutflow(const DirectedFlow& f, Vertex x) {
  const CubeTopology& topo = f.topology();
  topo.requireVertex(x);
  double s = 0.0;
  for (int i = 0; i < topo.dim(); ++i) {
    const double v = f.signedValues()[static_cast<Eigen::Index>(topo.edgeIndex(x, i))];
    s += ((x >> i) & 1u) ? -v : v;
  }
  return s;
}

Eigen::VectorXd netOutflows(const DirectedFlow& f) {
  const CubeTopology& topo = f.topology();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(topo.vertexCount()));
  const Eigen::VectorXd& v = f.signedValues();
  for (std::size_t i = 0; i < topo.edgeCount(); ++i) {
    const double x = v[static_cast<Eigen::Index>(i)];
    if (x == 0.0) continue;
    const EdgeId e = topo.edgeAt(i);
    out[e.lower] += x;
    out[e.upper()] -= x;
  }
  return out;
}

double conservationResidual(const DirectedFlow& f) {
  const Eigen::VectorXd out = netOutflows(f);
  double sum = 0.0, carry = 0.0;  // Kahan
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const double y = out[i] - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return sum;
}

double flowSize(const DirectedFlow& f) { return 0.5 * netOutflows(f).cwiseAbs().sum(); }

FeasibilityReport checkFeasible(const DirectedFlow& f, const Eigen::VectorXd& cap, double tol) {
  if (tol < 0.0) throw std::invalid_argument("tolerance must be nonnegative");
  const Eigen::VectorXd& v = f.signedValues();
  if (cap.size() != v.size()) throw std::invalid_argument("capacity vector length mismatch");
  FeasibilityReport rep;
  rep.worstExcess = -std::numeric_limits<double>::infinity();
  std::size_t worst = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double use = std::abs(v[i]);
    const double excess = use - cap[i];
    if (excess > rep.worstExcess) {
      rep.worstExcess = excess;
      worst = static_cast<std::size_t>(i);
    }
    if (use > 0.0) {
      const double ratio = cap[i] > 0.0 ? use / cap[i] : std::numeric_limits<double>::infinity();
      rep.maxRatio = std::max(rep.maxRatio, ratio);
    }
  }
  if (v.size() > 0) rep.worstEdge = f.topology().edgeAt(worst);
  rep.feasible = rep.worstExcess <= tol;
  return rep;
}

FeasibilityReport checkFeasible(const DirectedFlow& f, const CapacityNetwork& net, double tol) {
  return checkFeasible(f, net.cap, tol);
}

FeasibilityReport checkFeasible(const DirectedFlow& f, const ScaledNetwork& net, double tol) {
  return checkFeasible(f, scaledCapacities(net), tol);
}

namespace {

std::vector<char> membership(const CubeTopology& topo, const std::vector<Vertex>& set, char tag,
                             std::vector<char> into) {
  for (Vertex x : set) {
    topo.requireVertex(x);
    if (into[x] != 0 && into[x] != tag) throw std::domain_error("source and sink sets intersect");
    into[x] = tag;
  }
  return into;
}

// 1 for S, 2 for T
std::vector<char> sidesOf(const CubeTopology& topo, const std::vector<Vertex>& S,
                          const std::vector<Vertex>& T) {
  if (S.empty() || T.empty()) throw std::domain_error("source and sink sets must be nonempty");
  std::vector<char> side(topo.vertexCount(), 0);
  side = membership(topo, S, 1, std::move(side));
  side = membership(topo, T, 2, std::move(side));
  return side;
}

BalanceReport balanceFromOutflows(const Eigen::VectorXd& out, const std::vector<char>& side,
                                  std::size_t nS, std::size_t nT) {
  BalanceReport r;
  r.size = 0.5 * out.cwiseAbs().sum();
  for (Eigen::Index x = 0; x < out.size(); ++x)
    if (side[x] == 1) r.volume += out[x];
  const double perS = r.volume / static_cast<double>(nS);
  const double perT = r.volume / static_cast<double>(nT);
  for (Eigen::Index x = 0; x < out.size(); ++x) {
    if (side[x] == 1)
      r.boundaryDeviation += std::abs(out[x] - perS);
    else if (side[x] == 2)
      r.boundaryDeviation += std::abs(-out[x] - perT);
    else
      r.interiorImbalance += std::abs(out[x]);
  }
  if (r.volume > 0.0)
    r.mu = r.boundaryDeviation / r.volume;
  else
    r.mu = r.boundaryDeviation > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return r;
}

std::size_t distinctCount(const std::vector<char>& side, char tag) {
  return static_cast<std::size_t>(std::count(side.begin(), side.end(), tag));
}

}  // namespace

BalanceReport balanceReport(const DirectedFlow& f, const std::vector<Vertex>& S,
                            const std::vector<Vertex>& T) {
  const auto side = sidesOf(f.topology(), S, T);
  return balanceFromOutflows(netOutflows(f), side, distinctCount(side, 1), distinctCount(side, 2));
}

namespace {

class Decomposer {
 public:
  explicit Decomposer(const DirectedFlow& f)
      : topo_(f.topology()), d_(topo_.dim()), rem_(f.signedValues()), pos_(topo_.vertexCount(), -1),
        edge_(topo_.vertexCount() * static_cast<std::size_t>(d_)) {
    for (Vertex x = 0; x < topo_.vertexCount(); ++x)
      for (int dim = 0; dim < d_; ++dim)
        edge_[x * static_cast<std::size_t>(d_) + dim] = static_cast<std::uint32_t>(topo_.edgeIndex(x, dim));
    const double scale = std::max(rem_.size() ? rem_.cwiseAbs().maxCoeff() : 0.0, 1e-300);
    edgeTol_ = 1e-15 * scale;
    netTol_ = 1e-13 * scale;
    for (Eigen::Index i = 0; i < rem_.size(); ++i)
      if (std::abs(rem_[i]) <= edgeTol_) {
        out_.residual += std::abs(rem_[i]);
        rem_[i] = 0.0;
      }
    net_ = netOutflows(DirectedFlow(topo_, rem_));
    // remaining values only shrink toward zero, so each edge keeps its direction
    outStart_.assign(topo_.vertexCount() + 1, 0);
    for (Vertex x = 0; x < topo_.vertexCount(); ++x) {
      outStart_[x] = static_cast<std::uint32_t>(outDims_.size());
      for (int dim = 0; dim < d_; ++dim)
        if (outgoing(x, dim) > 0.0) outDims_.push_back(static_cast<std::uint8_t>(dim));
    }
    outStart_[topo_.vertexCount()] = static_cast<std::uint32_t>(outDims_.size());
  }

  Decomposition run() {
    const std::size_t budget = 4 * (topo_.edgeCount() + topo_.vertexCount()) + 16;
    std::size_t steps = 0;
    for (Vertex a = 0; a < topo_.vertexCount(); ++a) {
      while (net_[a] > netTol_) {
        if (++steps > budget) throw std::logic_error("path decomposition did not terminate");
        walkPath(a);
      }
    }
    for (Eigen::Index i = 0; i < rem_.size(); ++i) {
      while (rem_[i] != 0.0) {
        if (++steps > budget) throw std::logic_error("cycle decomposition did not terminate");
        const EdgeId e = topo_.edgeAt(static_cast<std::size_t>(i));
        walkCycle(rem_[i] > 0.0 ? e.lower : e.upper());
      }
    }
    return std::move(out_);
  }

 private:
  std::uint32_t edge(Vertex y, int dim) const { return edge_[y * static_cast<std::size_t>(d_) + dim]; }

  double outgoing(Vertex y, int dim) const {
    const double v = rem_[edge(y, dim)];
    return ((y >> dim) & 1u) ? -v : v;
  }

  // highest remaining outgoing edge, ties to the smallest canonical index; -1 if none
  int bestOut(Vertex y) const {
    int best = -1;
    double bestVal = 0.0;
    std::uint32_t bestIdx = 0;
    for (std::uint32_t k = outStart_[y]; k < outStart_[y + 1]; ++k) {
      const int i = outDims_[k];
      const double o = outgoing(y, i);
      if (o <= 0.0) continue;
      const std::uint32_t idx = edge(y, i);
      if (best < 0 || o > bestVal || (o == bestVal && idx < bestIdx)) {
        best = i;
        bestVal = o;
        bestIdx = idx;
      }
    }
    return best;
  }

  void subtract(Vertex from, Vertex to, double amount) {
    const int dim = std::countr_zero(from ^ to);
    double& r = rem_[edge(from, dim)];
    r -= ((from >> dim) & 1u) ? -amount : amount;
    if (std::abs(r) <= edgeTol_) {
      out_.residual += std::abs(r);
      r = 0.0;
    }
  }

  void clearPath() {
    for (Vertex x : path_) pos_[x] = -1;
    path_.clear();
  }

  void truncateTo(int p) {
    for (std::size_t i = static_cast<std::size_t>(p) + 1; i < path_.size(); ++i) pos_[path_[i]] = -1;
    path_.resize(static_cast<std::size_t>(p) + 1);
  }

  // cycle closes when `z` (already on the path) is reached from the path's end
  void extractCycle(Vertex z) {
    const int p = pos_[z];
    std::vector<Vertex> cyc(path_.begin() + p, path_.end());
    double value = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cyc.size(); ++i) {
      const Vertex x = cyc[i], y = cyc[(i + 1) % cyc.size()];
      value = std::min(value, outgoing(x, std::countr_zero(x ^ y)));
    }
    for (std::size_t i = 0; i < cyc.size(); ++i) subtract(cyc[i], cyc[(i + 1) % cyc.size()], value);
    out_.cycles.push_back(PathFlow{std::move(cyc), value});
    truncateTo(p);
  }

  void walkPath(Vertex a) {
    clearPath();
    path_.push_back(a);
    pos_[a] = 0;
    for (;;) {
      const Vertex y = path_.back();
      if (y != a && net_[y] < -netTol_) break;
      const int dim = bestOut(y);
      if (dim < 0) break;  // only reachable through rounding; y absorbs the path
      const Vertex z = y ^ (Vertex{1} << dim);
      if (pos_[z] >= 0) {
        extractCycle(z);
        continue;
      }
      pos_[z] = static_cast<int>(path_.size());
      path_.push_back(z);
    }
    const Vertex b = path_.back();
    if (b == a) {
      // the excess at a was fed only by cycles that are now gone
      out_.residual += net_[a];
      net_[a] = 0.0;
      clearPath();
      return;
    }
    double value = net_[a];
    if (net_[b] < 0.0) value = std::min(value, -net_[b]);
    for (std::size_t i = 0; i + 1 < path_.size(); ++i)
      value = std::min(value, outgoing(path_[i], std::countr_zero(path_[i] ^ path_[i + 1])));
    for (std::size_t i = 0; i + 1 < path_.size(); ++i) subtract(path_[i], path_[i + 1], value);
    net_[a] -= value;
    net_[b] += value;
    out_.paths.push_back(PathFlow{path_, value});
    clearPath();
  }

  void walkCycle(Vertex start) {
    clearPath();
    path_.push_back(start);
    pos_[start] = 0;
    for (;;) {
      const Vertex y = path_.back();
      const int dim = bestOut(y);
      if (dim < 0) {
        // rounding remnant: drop the dangling walk into the residual
        double value = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < path_.size(); ++i)
          value = std::min(value, outgoing(path_[i], std::countr_zero(path_[i] ^ path_[i + 1])));
        if (path_.size() < 2) break;
        for (std::size_t i = 0; i + 1 < path_.size(); ++i) subtract(path_[i], path_[i + 1], value);
        out_.residual += value;
        break;
      }
      const Vertex z = y ^ (Vertex{1} << dim);
      if (pos_[z] >= 0) {
        extractCycle(z);
        break;
      }
      pos_[z] = static_cast<int>(path_.size());
      path_.push_back(z);
    }
    clearPath();
  }

  CubeTopology topo_;
  int d_;
  Eigen::VectorXd rem_;
  Eigen::VectorXd net_;
  std::vector<int> pos_;
  std::vector<std::uint32_t> edge_;
  std::vector<std::uint32_t> outStart_;
  std::vector<std::uint8_t> outDims_;
  std::vector<Vertex> path_;
  double edgeTol_ = 0.0;
  double netTol_ = 0.0;
  Decomposition out_;
};

}  // namespace

Decomposition decomposeByExcess(const DirectedFlow& f) { return Decomposer(f).run(); }

Decomposition decompose(const DirectedFlow& f, const std::vector<Vertex>& S,
                        const std::vector<Vertex>& T) {
  const BalanceReport b = balanceReport(f, S, T);
  if (b.interiorImbalance > kProperTolerance * std::max(b.size, 1e-300) && b.interiorImbalance > 0.0)
    throw std::domain_error("flow is not proper (interior imbalance " +
                            std::to_string(b.interiorImbalance) + "); stitch it first");
  return decomposeByExcess(f);
}

DirectedFlow recombine(const CubeTopology& topo, const Decomposition& parts) {
  DirectedFlow g(topo);
  for (const PathFlow& p : parts.paths) g.addPath(p.vertices, p.value);
  for (const PathFlow& c : parts.cycles) {
    g.addPath(c.vertices, c.value);
    if (c.vertices.size() > 1) g.add(c.vertices.back(), c.vertices.front(), c.value);
  }
  return g;
}

namespace {

StitchResult stitchImpl(const DirectedFlow& f, const std::vector<Vertex>& S,
                        const std::vector<Vertex>& T, const BalanceReport& in,
                        const std::vector<char>& side) {
  StitchResult res;
  res.report.size = in.size;
  res.report.interiorImbalance = in.interiorImbalance;
  res.report.boundaryDeviation = in.boundaryDeviation;
  res.report.thetaMeasured =
      in.size > 0.0 ? std::max(in.interiorImbalance, in.boundaryDeviation) / in.size : 0.0;

  // Paths of the augmented x -> y decomposition begin at a positive-excess vertex and end
  // at a deficit vertex; keep those leaving S and entering T, plus every cycle.
  const Decomposition parts = decomposeByExcess(f);
  DirectedFlow g(f.topology());
  for (const PathFlow& p : parts.paths) {
    if (side[p.vertices.front()] == 1 && side[p.vertices.back()] == 2)
      g.addPath(p.vertices, p.value);
    else
      res.report.deletedMass += p.value;
  }
  for (const PathFlow& c : parts.cycles) {
    g.addPath(c.vertices, c.value);
    g.add(c.vertices.back(), c.vertices.front(), c.value);
  }
  // snap the rounding noise so that g never exceeds f or flips an edge
  const Eigen::VectorXd& fv = f.signedValues();
  Eigen::VectorXd& gv = g.signedValues();
  for (Eigen::Index i = 0; i < gv.size(); ++i) {
    if (fv[i] >= 0.0)
      gv[i] = std::clamp(gv[i], 0.0, fv[i]);
    else
      gv[i] = std::clamp(gv[i], fv[i], 0.0);
  }
  const BalanceReport out = balanceFromOutflows(netOutflows(g), side, distinctCount(side, 1),
                                                distinctCount(side, 2));
  res.report.volume = out.volume;
  res.report.deviation = out.boundaryDeviation;
  res.flow = std::move(g);
  (void)S;
  (void)T;
  return res;
}

}  // namespace

StitchResult stitch(const DirectedFlow& f, const std::vector<Vertex>& S,
                    const std::vector<Vertex>& T, double theta) {
  if (!(theta >= 0.0 && theta < 1.0 / 9.0)) throw std::domain_error("stitch needs 0 <= theta < 1/9");
  const auto side = sidesOf(f.topology(), S, T);
  const BalanceReport in =
      balanceFromOutflows(netOutflows(f), side, distinctCount(side, 1), distinctCount(side, 2));
  const double slack = 1e-12 * std::max(in.size, 1.0);
  if (in.interiorImbalance > theta * in.size + slack || in.boundaryDeviation > theta * in.size + slack) {
    const double measured = in.size > 0.0 ? std::max(in.interiorImbalance, in.boundaryDeviation) / in.size
                                          : std::numeric_limits<double>::infinity();
    throw std::domain_error("stitch hypothesis violated: measured theta " + std::to_string(measured) +
                            " exceeds " + std::to_string(theta));
  }
  StitchResult res = stitchImpl(f, S, T, in, side);
  res.report.hypothesisHeld = true;
  return res;
}

StitchResult repairStitch(const DirectedFlow& f, const std::vector<Vertex>& S,
                          const std::vector<Vertex>& T) {
  const auto side = sidesOf(f.topology(), S, T);
  const BalanceReport in =
      balanceFromOutflows(netOutflows(f), side, distinctCount(side, 1), distinctCount(side, 2));
  StitchResult res = stitchImpl(f, S, T, in, side);
  res.report.hypothesisHeld = res.report.thetaMeasured < 1.0 / 9.0;
  return res;
}

}  // namespace hcflow
