#include "hcflow/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <unordered_map>

namespace hcflow {

std::vector<VertexPair> PairSet::enumerate(const CubeTopology& topo) const {
  std::vector<VertexPair> out;
  const Vertex n = static_cast<Vertex>(topo.vertexCount());
  switch (kind) {
    case Kind::Opp:
      for (Vertex u = 0; u < n; ++u)
        if (u < topo.antipode(u)) out.emplace_back(u, topo.antipode(u));
      break;
    case Kind::All:
      for (Vertex u = 0; u < n; ++u)
        for (Vertex v = u + 1; v < n; ++v) out.emplace_back(u, v);
      break;
    case Kind::Custom:
      for (const auto& [u, v] : custom) {
        topo.requireVertex(u);
        topo.requireVertex(v);
        if (u == v) throw std::domain_error("pair endpoints must differ");
        out.emplace_back(u, v);
      }
      break;
  }
  return out;
}

BoundReport upperBounds(const CapacityNetwork& base, const PairSet& pairs) {
  const CubeTopology& topo = base.topo;
  const int d = topo.dim();
  BoundReport r;
  r.cAv = base.averageCapacity();
  r.oppBound = r.cAv;
  r.allBound = std::ldexp(r.cAv, 1 - d);
  const double total = base.cap.sum();
  switch (pairs.kind) {
    case PairSet::Kind::Opp:
      r.distanceSum = std::ldexp(static_cast<double>(d), d - 1);
      break;
    case PairSet::Kind::All:
      r.distanceSum = std::ldexp(static_cast<double>(d), 2 * d - 2);
      break;
    case PairSet::Kind::Custom:
      if (pairs.custom.empty()) throw std::domain_error("pair set is empty");
      for (const auto& [u, v] : pairs.enumerate(topo)) r.distanceSum += popcount(u ^ v);
      break;
  }
  r.bound = total / r.distanceSum;
  return r;
}

namespace {

class Dinic {
 public:
  Dinic(const CubeTopology& topo, const Eigen::VectorXd& cap)
      : topo_(topo), cap_(cap), flow_(Eigen::VectorXd::Zero(cap.size())),
        level_(topo.vertexCount()), next_(topo.vertexCount()) {
    const double top = cap.size() ? cap.maxCoeff() : 0.0;
    eps_ = 1e-13 * std::max(top, 1e-300);
  }

  // residual capacity x -> x ^ (1 << dim)
  double residual(Vertex x, int dim) const {
    const auto e = static_cast<Eigen::Index>(topo_.edgeIndex(x, dim));
    const double f = ((x >> dim) & 1u) ? -flow_[e] : flow_[e];
    return cap_[e] - f;
  }

  double run(Vertex s, Vertex t) {
    double total = 0.0;
    while (bfs(s, t)) {
      std::fill(next_.begin(), next_.end(), 0);
      while (true) {
        const double pushed = dfs(s, t, std::numeric_limits<double>::infinity());
        if (!(pushed > eps_)) break;
        total += pushed;
      }
    }
    return total;
  }

  std::vector<Vertex> reachable(Vertex s) const {
    std::vector<std::uint8_t> seen(topo_.vertexCount(), 0);
    std::vector<Vertex> out{s};
    seen[s] = 1;
    for (std::size_t i = 0; i < out.size(); ++i)
      for (int dim = 0; dim < topo_.dim(); ++dim) {
        const Vertex y = out[i] ^ (Vertex{1} << dim);
        if (!seen[y] && residual(out[i], dim) > eps_) {
          seen[y] = 1;
          out.push_back(y);
        }
      }
    std::sort(out.begin(), out.end());
    return out;
  }

  const Eigen::VectorXd& flow() const { return flow_; }

 private:
  bool bfs(Vertex s, Vertex t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::vector<Vertex> queue{s};
    level_[s] = 0;
    for (std::size_t i = 0; i < queue.size(); ++i) {
      const Vertex x = queue[i];
      for (int dim = 0; dim < topo_.dim(); ++dim) {
        const Vertex y = x ^ (Vertex{1} << dim);
        if (level_[y] < 0 && residual(x, dim) > eps_) {
          level_[y] = level_[x] + 1;
          queue.push_back(y);
        }
      }
    }
    return level_[t] >= 0;
  }

  double dfs(Vertex x, Vertex t, double limit) {
    if (x == t) return limit;
    for (int& dim = next_[x]; dim < topo_.dim(); ++dim) {
      const Vertex y = x ^ (Vertex{1} << dim);
      const double r = residual(x, dim);
      if (level_[y] != level_[x] + 1 || !(r > eps_)) continue;
      const double pushed = dfs(y, t, std::min(limit, r));
      if (pushed > eps_) {
        const auto e = static_cast<Eigen::Index>(topo_.edgeIndex(x, dim));
        flow_[e] += ((x >> dim) & 1u) ? -pushed : pushed;
        return pushed;
      }
    }
    return 0.0;
  }

  const CubeTopology& topo_;
  const Eigen::VectorXd& cap_;
  Eigen::VectorXd flow_;
  std::vector<int> level_;
  std::vector<int> next_;
  double eps_ = 0.0;
};

}  // namespace

MaxFlowResult maxFlowSingle(const CubeTopology& topo, const Eigen::VectorXd& cap, Vertex s, Vertex t) {
  topo.requireVertex(s);
  topo.requireVertex(t);
  if (s == t) throw std::domain_error("max flow needs s != t");
  if (cap.size() != static_cast<Eigen::Index>(topo.edgeCount()))
    throw std::domain_error("capacity vector length does not match the cube");
  if ((cap.array() < 0.0).any()) throw std::domain_error("capacities must be nonnegative");
  Dinic dinic(topo, cap);
  MaxFlowResult r;
  r.value = dinic.run(s, t);
  r.flow = DirectedFlow(topo, dinic.flow());
  r.sourceSide = dinic.reachable(s);
  std::vector<std::uint8_t> inS(topo.vertexCount(), 0);
  for (Vertex x : r.sourceSide) inS[x] = 1;
  for (std::size_t e = 0; e < topo.edgeCount(); ++e) {
    const EdgeId id = topo.edgeAt(e);
    if (inS[id.lower] != inS[id.upper()]) r.cutCapacity += cap[static_cast<Eigen::Index>(e)];
  }
  return r;
}

MaxFlowResult maxFlowSingle(const CapacityNetwork& net, Vertex s, Vertex t) {
  return maxFlowSingle(net.topo, net.cap, s, t);
}

MaxFlowResult maxFlowSingle(const ScaledNetwork& net, Vertex s, Vertex t) {
  return maxFlowSingle(net.base->topo, scaledCapacities(net), s, t);
}

DirectedFlow toDirectedFlow(const CubeTopology& topo, const SparseCommodity& c) {
  DirectedFlow f(topo);
  for (const auto& [e, x] : c.edges) f.signedValues()[static_cast<Eigen::Index>(e)] += x;
  return f;
}

namespace {

void checkBudget(const CubeTopology& topo, const PairSet& pairs, std::size_t count) {
  const int d = topo.dim();
  switch (pairs.kind) {
    case PairSet::Kind::Opp:
      if (d > kOracleOppMaxDim)
        throw BudgetError("concurrent-flow oracle: opp pairs need d <= " + std::to_string(kOracleOppMaxDim) +
                          ", got d=" + std::to_string(d));
      break;
    case PairSet::Kind::All:
      if (d > kOracleAllMaxDim)
        throw BudgetError("concurrent-flow oracle: all pairs need d <= " + std::to_string(kOracleAllMaxDim) +
                          ", got d=" + std::to_string(d));
      break;
    case PairSet::Kind::Custom:
      if (d > kOracleOppMaxDim || count > kOracleCustomMaxPairs)
        throw BudgetError("concurrent-flow oracle: custom pairs need d <= " + std::to_string(kOracleOppMaxDim) +
                          " and at most " + std::to_string(kOracleCustomMaxPairs) + " pairs, got d=" +
                          std::to_string(d) + " with " + std::to_string(count) + " pairs");
      break;
  }
  if (count == 0) throw std::domain_error("pair set is empty");
}

struct PathStep {
  std::uint32_t edge;
  bool forward;  // lower -> upper
};

// Dijkstra from one source under per-edge lengths; stops when all wanted targets are settled.
// Indexed 4-ary heap with decrease-key, edge indices tabulated once.
class ShortestPaths {
 public:
  ShortestPaths(const CubeTopology& topo, const std::vector<double>& len)
      : topo_(topo), len_(len), d_(topo.dim()), dist_(topo.vertexCount()), pred_(topo.vertexCount()),
        pos_(topo.vertexCount(), kAbsent), wanted_(topo.vertexCount(), 0),
        edge_(topo.vertexCount() * static_cast<std::size_t>(topo.dim())) {
    for (Vertex x = 0; x < topo.vertexCount(); ++x)
      for (int dim = 0; dim < d_; ++dim)
        edge_[x * static_cast<std::size_t>(d_) + dim] = static_cast<std::uint32_t>(topo.edgeIndex(x, dim));
    heap_.reserve(topo.vertexCount());
  }

  void run(Vertex s, const std::vector<Vertex>& targets) {
    std::fill(dist_.begin(), dist_.end(), std::numeric_limits<double>::infinity());
    std::fill(pos_.begin(), pos_.end(), kAbsent);
    std::size_t remaining = 0;
    for (Vertex t : targets)
      if (!wanted_[t]) {
        wanted_[t] = 1;
        ++remaining;
      }
    heap_.clear();
    dist_[s] = 0.0;
    push(s);
    while (!heap_.empty() && remaining > 0) {
      const Vertex x = pop();
      if (wanted_[x]) --remaining;
      const double dx = dist_[x];
      const std::uint32_t* row = &edge_[x * static_cast<std::size_t>(d_)];
      for (int dim = 0; dim < d_; ++dim) {
        const double nd = dx + len_[row[dim]];
        const Vertex y = x ^ (Vertex{1} << dim);
        if (nd < dist_[y] && pos_[y] != kSettled) {
          dist_[y] = nd;
          pred_[y] = dim;
          if (pos_[y] == kAbsent)
            push(y);
          else
            siftUp(pos_[y]);
        }
      }
    }
    for (Vertex t : targets) wanted_[t] = 0;
  }

  double dist(Vertex t) const { return dist_[t]; }

  std::vector<PathStep> path(Vertex s, Vertex t) const {
    std::vector<PathStep> steps;
    for (Vertex y = t; y != s;) {
      const int dim = pred_[y];
      const Vertex x = y ^ (Vertex{1} << dim);
      steps.push_back({edge_[x * static_cast<std::size_t>(d_) + dim], ((x >> dim) & 1u) == 0});
      y = x;
    }
    return steps;
  }

 private:
  static constexpr std::uint32_t kAbsent = 0xffffffffu;
  static constexpr std::uint32_t kSettled = 0xfffffffeu;

  void push(Vertex x) {
    heap_.push_back(x);
    siftUp(static_cast<std::uint32_t>(heap_.size() - 1));
  }
  Vertex pop() {
    const Vertex top = heap_.front();
    pos_[top] = kSettled;
    const Vertex last = heap_.back();
    heap_.pop_back();
    if (!heap_.empty()) {
      heap_[0] = last;
      pos_[last] = 0;
      siftDown(0);
    }
    return top;
  }
  void siftUp(std::uint32_t i) {
    const Vertex x = heap_[i];
    while (i > 0) {
      const std::uint32_t parent = (i - 1) / 4;
      if (!(dist_[x] < dist_[heap_[parent]])) break;
      heap_[i] = heap_[parent];
      pos_[heap_[i]] = i;
      i = parent;
    }
    heap_[i] = x;
    pos_[x] = i;
  }
  void siftDown(std::uint32_t i) {
    const Vertex x = heap_[i];
    const auto n = static_cast<std::uint32_t>(heap_.size());
    while (true) {
      const std::uint32_t first = 4 * i + 1;
      if (first >= n) break;
      std::uint32_t bestChild = first;
      for (std::uint32_t c = first + 1; c < std::min(first + 4, n); ++c)
        if (dist_[heap_[c]] < dist_[heap_[bestChild]]) bestChild = c;
      if (!(dist_[heap_[bestChild]] < dist_[x])) break;
      heap_[i] = heap_[bestChild];
      pos_[heap_[i]] = i;
      i = bestChild;
    }
    heap_[i] = x;
    pos_[x] = i;
  }

  const CubeTopology& topo_;
  const std::vector<double>& len_;
  int d_;
  std::vector<double> dist_;
  std::vector<int> pred_;
  std::vector<std::uint32_t> pos_;
  std::vector<std::uint8_t> wanted_;
  std::vector<std::uint32_t> edge_;
  std::vector<Vertex> heap_;
};

std::vector<int> components(const CubeTopology& topo, const Eigen::VectorXd& cap) {
  std::vector<int> comp(topo.vertexCount(), -1);
  int next = 0;
  for (Vertex s = 0; s < topo.vertexCount(); ++s) {
    if (comp[s] >= 0) continue;
    std::vector<Vertex> stack{s};
    comp[s] = next;
    while (!stack.empty()) {
      const Vertex x = stack.back();
      stack.pop_back();
      for (int dim = 0; dim < topo.dim(); ++dim) {
        const Vertex y = x ^ (Vertex{1} << dim);
        if (comp[y] < 0 && cap[static_cast<Eigen::Index>(topo.edgeIndex(x, dim))] > 0.0) {
          comp[y] = next;
          stack.push_back(y);
        }
      }
    }
    ++next;
  }
  return comp;
}

}  // namespace

ConcurrentResult maxConcurrentUniform(const CapacityNetwork& base, const PairSet& pairSet,
                                      const ConcurrentOptions& options) {
  if (!(options.omega > 0.0 && options.omega < 1.0)) throw std::domain_error("omega must lie in (0, 1)");
  const CubeTopology& topo = base.topo;
  ConcurrentResult res;
  res.pairs = pairSet.enumerate(topo);
  checkBudget(topo, pairSet, res.pairs.size());
  const std::size_t nPairs = res.pairs.size();

  {
    const std::vector<int> comp = components(topo, base.cap);
    for (const auto& [u, v] : res.pairs)
      if (comp[u] != comp[v]) {
        res.converged = true;
        if (options.keepFlows)
          for (const auto& [a, b] : res.pairs) res.flows.push_back({a, b, {}});
        return res;
      }
  }

  const std::size_t m = topo.edgeCount();
  std::vector<std::size_t> live;  // edges with positive capacity
  for (std::size_t e = 0; e < m; ++e)
    if (base.cap[static_cast<Eigen::Index>(e)] > 0.0) live.push_back(e);
  std::vector<double> invCap(m, 0.0);
  for (std::size_t e : live) invCap[e] = 1.0 / base.cap[static_cast<Eigen::Index>(e)];

  // blocks: all commodities sharing a source move together
  std::vector<Vertex> sources;
  std::vector<std::vector<std::size_t>> blocks;
  {
    std::unordered_map<Vertex, std::size_t> slot;
    for (std::size_t j = 0; j < nPairs; ++j) {
      auto [it, fresh] = slot.try_emplace(res.pairs[j].first, blocks.size());
      if (fresh) {
        sources.push_back(res.pairs[j].first);
        blocks.emplace_back();
      }
      blocks[it->second].push_back(j);
    }
  }

  // path-based state; an arc is edge << 1 | (1 when traversed upper -> lower)
  struct Path {
    std::vector<std::uint32_t> arcs;  // ascending
    double weight = 0.0;
  };
  std::vector<std::vector<Path>> paths(nPairs);
  std::vector<double> load(m, 0.0), len(m, std::numeric_limits<double>::infinity());
  ShortestPaths sp(topo, len);
  std::vector<Vertex> targets;

  auto pathOf = [&](Vertex s, Vertex t) {
    std::vector<std::uint32_t> arcs;
    for (const PathStep& st : sp.path(s, t)) arcs.push_back(st.edge << 1 | (st.forward ? 0u : 1u));
    std::sort(arcs.begin(), arcs.end());
    return arcs;
  };
  auto routeBlock = [&](std::size_t b) {
    targets.clear();
    for (std::size_t j : blocks[b]) targets.push_back(res.pairs[j].second);
    sp.run(sources[b], targets);
  };
  // per-edge usage after cancelling opposite traversals within a commodity
  auto signedFlow = [&](std::size_t j) {
    std::vector<std::pair<std::uint32_t, double>> f;
    for (const Path& p : paths[j])
      for (std::uint32_t a : p.arcs) f.emplace_back(a >> 1, (a & 1u) ? -p.weight : p.weight);
    std::sort(f.begin(), f.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<std::pair<std::uint32_t, double>> out;
    for (const auto& [e, x] : f) {
      if (!out.empty() && out.back().first == e)
        out.back().second += x;
      else
        out.emplace_back(e, x);
    }
    return out;
  };
  auto pathLoads = [&] {
    std::fill(load.begin(), load.end(), 0.0);
    for (const auto& ps : paths)
      for (const Path& p : ps)
        for (std::uint32_t a : p.arcs) load[a >> 1] += p.weight;
    double lambda = 0.0;
    for (std::size_t e : live) lambda = std::max(lambda, load[e] * invCap[e]);
    return lambda;
  };

  for (std::size_t e : live) len[e] = invCap[e];
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    routeBlock(b);
    for (std::size_t j : blocks[b]) paths[j].push_back({pathOf(sources[b], res.pairs[j].second), 1.0});
  }

  const double logM = std::log(static_cast<double>(std::max<std::size_t>(live.size(), 2)));
  double best = std::numeric_limits<double>::infinity();
  std::optional<std::chrono::steady_clock::time_point> softDeadline;
  if (options.timeLimitSeconds > 0.0)
    softDeadline = std::chrono::steady_clock::now() +
                   std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                       std::chrono::duration<double>(options.timeLimitSeconds));
  std::vector<double> delta(m, 0.0);
  std::vector<std::uint32_t> diff;

  auto pathLength = [&](const Path& p) {
    double l = 0.0;
    for (std::uint32_t a : p.arcs) l += len[a >> 1];
    return l;
  };
  double eta = 0.0, lambda = 0.0;
  auto weightOf = [&](double ratio) { return std::exp(eta * (ratio - lambda)) + 1e-300; };

  // pairwise moves from the longest active path to ps[target], exact line search
  auto rebalance = [&](std::vector<Path>& ps, std::size_t target) {
    for (std::size_t round = 0; round < ps.size(); ++round) {
      const double lt = pathLength(ps[target]);
      std::size_t worst = target;
      double lw = lt;
      for (std::size_t q = 0; q < ps.size(); ++q) {
        if (q == target || ps[q].weight <= 0.0) continue;
        const double l = pathLength(ps[q]);
        if (l > lw) {
          lw = l;
          worst = q;
        }
      }
      if (worst == target || lw <= lt * (1.0 + 1e-12)) break;
      // edges gaining (+1) and losing (-1) load; shared edges cancel
      diff.clear();
      for (std::uint32_t a : ps[target].arcs) {
        delta[a >> 1] += 1.0;
        diff.push_back(a >> 1);
      }
      for (std::uint32_t a : ps[worst].arcs) {
        delta[a >> 1] -= 1.0;
        diff.push_back(a >> 1);
      }
      std::sort(diff.begin(), diff.end());
      diff.erase(std::unique(diff.begin(), diff.end()), diff.end());
      const double cap = ps[worst].weight;
      // derivative of the potential along the move, and its own derivative
      auto slope = [&](double t, double& curv) {
        double sl = 0.0;
        curv = 0.0;
        for (std::uint32_t e : diff)
          if (delta[e] != 0.0) {
            const double w = delta[e] * invCap[e] * weightOf((load[e] + t * delta[e]) * invCap[e]);
            sl += w;
            curv += w * delta[e] * invCap[e] * eta;
          }
        return sl;
      };
      double curv = 0.0;
      double t = cap;
      if (slope(cap, curv) > 0.0) {
        // Newton with bisection fallback on the bracket [lo, hi] (slope(lo) < 0 < slope(hi))
        double lo = 0.0, hi = cap;
        t = 0.5 * cap;
        double step = cap, prevStep = cap;
        double sl = slope(t, curv);
        for (int it = 0; it < 100; ++it) {
          const bool outside = ((t - hi) * curv - sl) * ((t - lo) * curv - sl) > 0.0;
          if (outside || !std::isfinite(sl / curv) || std::abs(2.0 * sl) > std::abs(prevStep * curv)) {
            prevStep = step;
            step = 0.5 * (hi - lo);
            t = lo + step;
          } else {
            prevStep = step;
            step = sl / curv;
            t -= step;
          }
          if (std::abs(step) <= 1e-15 * cap) break;
          sl = slope(t, curv);
          if (sl > 0.0)
            hi = t;
          else
            lo = t;
        }
        t = std::clamp(t, lo, hi);
      }
      if (t > 0.0) {
        for (std::uint32_t e : diff) {
          load[e] = std::max(0.0, load[e] + t * delta[e]);
          len[e] = weightOf(load[e] * invCap[e]) * invCap[e];
        }
        ps[worst].weight -= t;
        ps[target].weight += t;
        if (ps[worst].weight <= 1e-15 * ps[target].weight) {
          ps[target].weight += ps[worst].weight;
          ps[worst].weight = 0.0;
        }
      }
      for (std::uint32_t e : diff) delta[e] = 0.0;
      if (t <= 0.0) break;
    }
    std::erase_if(ps, [](const Path& p) { return p.weight <= 0.0; });
  };

  // shortest paths are priced every kInner + 1 sweeps; the sweeps in between only
  // rebalance each commodity over the paths it already holds
  constexpr int kInner = 7;
  int priced = 0;
  for (res.iterations = 0; res.iterations < options.maxIterations; ++res.iterations) {
    if (options.deadline && std::chrono::steady_clock::now() > *options.deadline)
      throw OracleTimeout("concurrent-flow oracle ran past its time limit");
    lambda = pathLoads();
    const double primal = 1.0 / lambda;
    const double gap = std::isfinite(best) ? std::max(0.0, 1.0 - primal / best) : 1.0;
    // temperature follows the current gap
    const double eps = std::clamp(gap / 3.0, options.omega / 4.0, 0.25);
    eta = logM / (eps * lambda);

    double z = 0.0;
    for (std::size_t e : live) {
      const double w = weightOf(load[e] * invCap[e]);
      len[e] = w * invCap[e];
      z += w;
    }
    const bool softStop = softDeadline && std::chrono::steady_clock::now() > *softDeadline;
    const bool pricing = res.iterations % (kInner + 1) == 0;
    // dual bound: Phi <= sum c_e l_e / sum_j dist_j(l) for any lengths l
    if ((pricing && (priced < 2 || priced % 3 == 0)) || softStop) {
      double distSum = 0.0;
      for (std::size_t b = 0; b < blocks.size(); ++b) {
        routeBlock(b);
        for (std::size_t j : blocks[b]) distSum += sp.dist(res.pairs[j].second);
      }
      best = std::min(best, z / distSum);
      if (primal >= (1.0 - options.omega) * best) {
        res.converged = true;
        break;
      }
    }
    if (softStop) break;

    if (!pricing) {
      for (std::vector<Path>& ps : paths) {
        std::size_t target = 0;
        double lt = std::numeric_limits<double>::infinity();
        for (std::size_t q = 0; q < ps.size(); ++q) {
          const double l = pathLength(ps[q]);
          if (l < lt) {
            lt = l;
            target = q;
          }
        }
        rebalance(ps, target);
      }
      continue;
    }
    ++priced;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      routeBlock(b);
      for (std::size_t j : blocks[b]) {
        std::vector<Path>& ps = paths[j];
        std::vector<std::uint32_t> shortest = pathOf(sources[b], res.pairs[j].second);
        std::size_t target = ps.size();
        for (std::size_t q = 0; q < ps.size(); ++q)
          if (ps[q].arcs == shortest) target = q;
        if (target == ps.size()) ps.push_back({std::move(shortest), 0.0});
        rebalance(ps, target);
      }
    }
  }
  res.upperBound = best;

  // certify against the cancelled per-edge usage
  std::vector<std::vector<std::pair<std::uint32_t, double>>> flows(nPairs);
  std::fill(load.begin(), load.end(), 0.0);
  for (std::size_t j = 0; j < nPairs; ++j) {
    flows[j] = signedFlow(j);
    for (const auto& [e, x] : flows[j]) load[e] += std::abs(x);
  }
  lambda = 0.0;
  for (std::size_t e : live) lambda = std::max(lambda, load[e] * invCap[e]);
  res.phi = lambda > 0.0 ? 1.0 / lambda : 0.0;
  if (options.keepFlows) {
    res.flows.reserve(nPairs);
    for (std::size_t j = 0; j < nPairs; ++j) {
      SparseCommodity c{res.pairs[j].first, res.pairs[j].second, {}};
      for (const auto& [e, x] : flows[j])
        if (x != 0.0) c.edges.emplace_back(e, x * res.phi);
      res.flows.push_back(std::move(c));
    }
  }
  return res;
}

}  // namespace hcflow
