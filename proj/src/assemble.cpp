#include "hcflow/assemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "hcflow/rng.hpp"

namespace hcflow {

CommoditySpec classifyPair(const CubeTopology& topo, Vertex u, Vertex v) {
  topo.requireVertex(u);
  topo.requireVertex(v);
  if (u == v) throw std::domain_error("commodity endpoints must differ");
  const int k = popcount(u ^ v);
  CommoditySpec spec{u, v, CommodityKind::Far, 0.0};
  if (v == topo.antipode(u))
    spec.kind = CommodityKind::Antipodal;
  else if (!isFarPair(topo.dim(), k))
    spec.kind = CommodityKind::Near;
  return spec;
}

Pipeline::Pipeline(const CapacityNetwork& base, PipelineParams params)
    : base_(&base), params_(std::move(params)) {
  const CubeTopology& topo = base.topo;
  ell_ = effectiveEll(topo.dim(), params_.scaling);
  try {
    truncation_ = truncateToBernoulli(base.dist);
    escapeOpen_ = openEdges(truncatedCapacities(base, truncation_), truncation_.cStar);
  } catch (const std::domain_error& e) {
    escapeProblem_ = e.what();
  }
  const Eigen::VectorXd disc = discretizedCapacities(base, params_.discretizeEps);
  const std::vector<Atom> law = discretize(base.dist, params_.discretizeEps).atoms();
  atoms_ = thinAtoms(disc, law, params_.middle.layer, params_.thinSeed.value_or(base.seed));
  for (const ThinnedAtom& a : atoms_) middleTarget_ += a.value * a.thinning.p;
}

Pipeline::CachedPlan& Pipeline::plan(Vertex u, int ell) {
  const auto key = std::make_pair(u, ell);
  if (auto it = plans_.find(key); it != plans_.end()) return *it->second;
  if (!escapeProblem_.empty()) throw ConstructionError("escape", escapeProblem_);
  double alpha = params_.alpha;
  std::string last;
  for (int attempt = 0; attempt <= params_.alphaRetries; ++attempt, alpha /= 2.0) {
    try {
      auto cached = std::make_unique<CachedPlan>();
      cached->plan = propagateToShell(base_->topo, escapeOpen_, u, ell, alpha, truncation_.cStar);
      return *plans_.emplace(key, std::move(cached)).first->second;
    } catch (const EscapeError& e) {
      last = e.what();
    }
  }
  throw ConstructionError("escape", last);
}

CommodityResult Pipeline::finish(Vertex u, Vertex v, const DirectedFlow& combined,
                                 const MiddleReport* middle, double middleVolume) {
  const BalanceReport before = balanceReport(combined, {u}, {v});
  const double theta = before.size > 0.0
                           ? std::max(before.interiorImbalance, before.boundaryDeviation) / before.size
                           : 0.0;
  StitchResult st = theta < 1.0 / 9.0 ? stitch(combined, {u}, {v}, theta) : repairStitch(combined, {u}, {v});
  CommodityResult r;
  r.flow = std::move(st.flow);
  r.stitch = st.report;
  r.volume = st.report.volume;
  r.finalMu = balanceReport(r.flow, {u}, {v}).mu;
  r.middleVolume = middleVolume;
  if (middle) {
    r.middleMu = middle->mu;
    r.middleHypothesisHeld = middle->hypothesisHeld;
  }
  return r;
}

CommodityResult Pipeline::antipodal(Vertex u) {
  const CubeTopology& topo = base_->topo;
  topo.requireVertex(u);
  const Vertex ubar = topo.antipode(u);
  const Frame frame = Frame::whole(topo, u);
  if (ell_ + 1 > topo.dim() - ell_)
    throw ConstructionError("middle", "middle region empty for d=" + std::to_string(topo.dim()));
  const MiddleResult middle = buildMiddle(topo, frame, ell_, atoms_, params_.middle);
  const double vm = middle.report.volume;
  const CachedPlan& pu = plan(u, ell_);
  const CachedPlan& pv = plan(ubar, ell_);
  DirectedFlow combined = pu.plan.flow * vm + middle.flow - pv.plan.flow * vm;
  CommodityResult r = finish(u, ubar, combined, &middle.report, vm);
  r.alphaUsed = std::min(pu.plan.alpha, pv.plan.alpha);
  r.Mused = std::max(pu.plan.Mused, pv.plan.Mused);
  if (!caching_) plans_.clear();
  return r;
}

CommodityResult Pipeline::farPair(Vertex u, Vertex v) {
  const CubeTopology& topo = base_->topo;
  topo.requireVertex(u);
  topo.requireVertex(v);
  const int d = topo.dim();
  const int k = popcount(u ^ v);
  if (u == v || !isFarPair(d, k))
    throw std::domain_error("far pair needs d(u, v) > d/4");
  const int ellPair = pairEll(ell_, k);
  const Frame frame = Frame::between(u, v);

  DirectedFlow head(topo), tail(topo);
  double alphaUsed = params_.alpha, mUsed = 0.0;
  if (ellPair >= 1) {
    const double toUnit = std::ldexp(1.0, d);
    for (int side = 0; side < 2; ++side) {
      const Vertex a = side == 0 ? u : v;
      const Vertex b = side == 0 ? v : u;
      CachedPlan& cp = plan(a, ellPair);
      if (cp.groups.empty()) cp.groups = shellPaths(cp.plan);
      DirectedFlow slice = subcubeSlice(topo, cp.plan, cp.groups, b) * toUnit;
      (side == 0 ? head : tail) = std::move(slice);
      alphaUsed = std::min(alphaUsed, cp.plan.alpha);
      mUsed = std::max(mUsed, cp.plan.Mused);
    }
  } else if (!escapeProblem_.empty()) {
    throw ConstructionError("escape", escapeProblem_);
  }

  std::optional<MiddleResult> middle;
  double vm = middleTarget_;
  if (ellPair + 1 <= k - ellPair) {
    middle = buildMiddle(topo, frame, ellPair, atoms_, params_.middle);
    vm = middle->report.volume;
  }
  DirectedFlow combined = head * vm - tail * vm;
  if (middle) combined += middle->flow;
  combined *= std::ldexp(1.0, 1 - d);
  CommodityResult r = finish(u, v, combined, middle ? &middle->report : nullptr, vm);
  r.alphaUsed = alphaUsed;
  r.Mused = mUsed;
  if (!caching_) plans_.clear();
  return r;
}

CommodityResult Pipeline::farPairCached(Vertex u, Vertex v) {
  if (!caching_) return farPair(u, v);
  if (auto it = farCache_.find({u, v}); it != farCache_.end()) return it->second;
  if (auto it = farCache_.find({v, u}); it != farCache_.end()) {
    CommodityResult r = it->second;
    r.flow = r.flow.reversed();
    return r;
  }
  return farCache_.emplace(std::make_pair(u, v), farPair(u, v)).first->second;
}

CommodityResult Pipeline::nearPair(Vertex u, Vertex v) {
  const CubeTopology& topo = base_->topo;
  topo.requireVertex(u);
  topo.requireVertex(v);
  const int k = popcount(u ^ v);
  if (u == v) throw std::domain_error("near pair endpoints must differ");
  if (isFarPair(topo.dim(), k)) throw std::domain_error("near pair needs 0 < d(u, v) <= d/4");
  const Vertex ubar = topo.antipode(u), vbar = topo.antipode(v);
  const CommodityResult legs[4] = {farPairCached(u, ubar), farPairCached(ubar, v),
                                   farPairCached(u, vbar), farPairCached(vbar, v)};
  double h = std::numeric_limits<double>::infinity();
  for (const CommodityResult& leg : legs) h = std::min(h, leg.volume);
  if (!(h > 0.0)) throw ConstructionError("near", "a constituent far flow has zero volume");
  h /= 2.0;
  DirectedFlow combined(topo);
  double mused = 0.0, alpha = params_.alpha, mv = std::numeric_limits<double>::infinity();
  for (const CommodityResult& leg : legs) {
    combined += leg.flow * (h / leg.volume);
    mused = std::max(mused, leg.Mused);
    alpha = std::min(alpha, leg.alphaUsed);
    mv = std::min(mv, leg.middleVolume);
  }
  CommodityResult r = finish(u, v, combined, nullptr, mv);
  r.Mused = mused;
  r.alphaUsed = alpha;
  return r;
}

CommodityResult Pipeline::commodity(Vertex u, Vertex v) {
  const CommoditySpec spec = classifyPair(base_->topo, u, v);
  return spec.kind == CommodityKind::Near ? nearPair(u, v) : farPairCached(u, v);
}

CommodityResult buildAntipodal(const CapacityNetwork& base, Vertex u, const PipelineParams& params) {
  Pipeline p(base, params);
  return p.antipodal(u);
}

CommodityResult buildFarPair(const CapacityNetwork& base, Vertex u, Vertex v,
                             const PipelineParams& params) {
  Pipeline p(base, params);
  return p.farPair(u, v);
}

CommodityResult buildNearPair(const CapacityNetwork& base, Vertex u, Vertex v,
                              const PipelineParams& params) {
  Pipeline p(base, params);
  p.enableCaching(true);
  return p.nearPair(u, v);
}

PairDesign allPairsDesign(const CubeTopology& topo, int perDistance, std::uint64_t seed) {
  const int d = topo.dim();
  PairDesign design;
  const Vertex n = static_cast<Vertex>(topo.vertexCount());
  if (d <= 7) {
    for (Vertex u = 0; u < n; ++u)
      for (Vertex v = u + 1; v < n; ++v) design.pairs.emplace_back(u, v);
    design.weights.assign(design.pairs.size(), 1.0);
    return design;
  }
  design.sampled = true;
  constexpr std::uint64_t kPairStream = streamTag("pairs");
  for (int k = 1; k <= d; ++k) {
    const double total = std::ldexp(1.0, d - 1) * static_cast<double>(binomial(d, k));
    std::set<std::pair<Vertex, Vertex>> chosen;
    const int want = static_cast<int>(std::min<double>(perDistance, total));
    std::uint64_t counter = static_cast<std::uint64_t>(k) << 40;
    while (static_cast<int>(chosen.size()) < want) {
      const Vertex u = static_cast<Vertex>(counterHash(seed, kPairStream, counter++) % n);
      // k distinct coordinates by a partial Fisher-Yates shuffle
      std::vector<int> dims(d);
      for (int i = 0; i < d; ++i) dims[i] = i;
      Vertex mask = 0;
      for (int i = 0; i < k; ++i) {
        const int j = i + static_cast<int>(counterHash(seed, kPairStream, counter++) % (d - i));
        std::swap(dims[i], dims[j]);
        mask |= Vertex{1} << dims[i];
      }
      const Vertex v = u ^ mask;
      chosen.emplace(std::min(u, v), std::max(u, v));
    }
    for (const auto& pr : chosen) {
      design.pairs.push_back(pr);
      design.weights.push_back(total / want);
    }
  }
  return design;
}

UniformFlowSolution solveUniform(const CapacityNetwork& base, PairMode mode,
                                 const PipelineParams& params, const SolveOptions& options) {
  const CubeTopology& topo = base.topo;
  const int d = topo.dim();
  Pipeline pipeline(base, params);
  UniformFlowSolution sol;
  sol.mode = mode;

  std::vector<std::pair<Vertex, Vertex>> pairs;
  std::vector<double> weights;
  if (mode == PairMode::Opp) {
    for (Vertex u = 0; u < (Vertex{1} << (d - 1)); ++u) pairs.emplace_back(u, topo.antipode(u));
    weights.assign(pairs.size(), 1.0);
  } else {
    PairDesign design = allPairsDesign(topo, params.pairsPerDistance, base.seed);
    pairs = std::move(design.pairs);
    weights = std::move(design.weights);
    sol.sampled = design.sampled;
    pipeline.enableCaching(d <= 7);
  }

  const auto ne = static_cast<Eigen::Index>(topo.edgeCount());
  Eigen::VectorXd unitDemand = Eigen::VectorXd::Zero(ne);  // sum of |f| / vol
  Eigen::VectorXd nearDemand = Eigen::VectorXd::Zero(ne);
  std::vector<DirectedFlow> unitFlows;
  sol.minMiddleVolume = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (options.deadline && std::chrono::steady_clock::now() > *options.deadline)
      throw DeadlineExceeded("constructive solve ran past its time limit");
    const auto [u, v] = pairs[i];
    CommoditySpec spec = classifyPair(topo, u, v);
    if (mode == PairMode::Opp) spec.kind = CommodityKind::Antipodal;
    double vol = 0.0;
    try {
      CommodityResult r = mode == PairMode::Opp ? pipeline.antipodal(u) : pipeline.commodity(u, v);
      vol = r.volume;
      if (vol > 0.0) {
        const Eigen::VectorXd use = r.flow.usage() * (weights[i] / vol);
        unitDemand += use;
        if (spec.kind == CommodityKind::Near) nearDemand += use;
        if (options.keepFlows) unitFlows.push_back(r.flow * (1.0 / vol));
      } else {
        sol.failures.push_back({u, v, "stitch", "zero volume after repair"});
        if (options.keepFlows) unitFlows.emplace_back(topo);
      }
      sol.minMiddleVolume = std::min(sol.minMiddleVolume, r.middleVolume);
      sol.maxMiddleMu = std::max(sol.maxMiddleMu, r.middleMu);
      sol.maxMused = std::max(sol.maxMused, r.Mused);
      sol.middleHypothesisFailures += !r.middleHypothesisHeld;
    } catch (const ConstructionError& e) {
      sol.failures.push_back({u, v, e.stage(), e.what()});
      if (options.keepFlows) unitFlows.emplace_back(topo);
    } catch (const std::domain_error& e) {
      sol.failures.push_back({u, v, "precondition", e.what()});
      if (options.keepFlows) unitFlows.emplace_back(topo);
    }
    spec.targetVolume = vol;
    sol.commodities.push_back(spec);
    sol.rawVolumes.push_back(vol);
  }
  if (!std::isfinite(sol.minMiddleVolume)) sol.minMiddleVolume = 0.0;

  const int ell = effectiveEll(d, params.scaling);
  sol.budget = 1.0 + 2.0 * (params.scaling.M - 1.0) * (ell + 2) / d + params.middle.layer.epsilon;
  sol.edgeUtilization = Eigen::VectorXd::Zero(ne);
  sol.phiBeforeRescale =
      sol.rawVolumes.empty() ? 0.0 : *std::min_element(sol.rawVolumes.begin(), sol.rawVolumes.end());
  if (sol.phiBeforeRescale > 0.0) {
    const Eigen::VectorXd demand = unitDemand * sol.phiBeforeRescale;
    double ratio = 0.0;
    for (Eigen::Index e = 0; e < ne; ++e) {
      if (demand[e] <= 0.0) continue;
      ratio = std::max(ratio, base.cap[e] > 0.0 ? demand[e] / base.cap[e]
                                                : std::numeric_limits<double>::infinity());
    }
    sol.demandRatio = ratio;
    if (std::isfinite(ratio) && ratio > 0.0) {
      const double scale = 1.0 / ratio;
      sol.phi = sol.phiBeforeRescale * scale;
      for (Eigen::Index e = 0; e < ne; ++e) {
        if (base.cap[e] <= 0.0) continue;
        sol.edgeUtilization[e] = demand[e] * scale / base.cap[e];
        sol.nearShare = std::max(sol.nearShare, nearDemand[e] * sol.phi / base.cap[e]);
      }
      if (options.keepFlows)
        for (DirectedFlow& f : unitFlows) f *= sol.phi;
    }
    sol.auditPassed = sol.demandRatio <= sol.budget;
  }
  if (options.keepFlows) {
    if (sol.phi == 0.0)
      for (DirectedFlow& f : unitFlows) f *= 0.0;
    sol.flows = std::move(unitFlows);
  }
  return sol;
}

}  // namespace hcflow
