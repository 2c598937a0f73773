#include "doctest.h"

#include <cmath>

#include "hcflow/assemble.hpp"

using namespace hcflow;

namespace {

CapacityNetwork ones(int d) { return sample(CapacityDistribution::bernoulli(1.0), CubeTopology(d), 1); }

void checkFinalFlows(const CapacityNetwork& net, const UniformFlowSolution& sol) {
  const CubeTopology& topo = net.topo;
  REQUIRE(sol.flows.size() == sol.commodities.size());
  Eigen::VectorXd load = Eigen::VectorXd::Zero(net.cap.size());
  for (std::size_t i = 0; i < sol.flows.size(); ++i) {
    const CommoditySpec& c = sol.commodities[i];
    load += sol.flows[i].usage();
    const BalanceReport b = balanceReport(sol.flows[i], {c.u}, {c.v});
    CHECK(b.volume == doctest::Approx(sol.phi).epsilon(1e-9));
    CHECK(b.interiorImbalance <= kProperTolerance * std::max(1.0, b.size));
  }
  CHECK((load.array() <= net.cap.array() * (1.0 + 1e-9) + 1e-15).all());
  (void)topo;
}

}  // namespace

TEST_CASE("pair classification") {
  const CubeTopology topo(8);
  CHECK(classifyPair(topo, 0, 255).kind == CommodityKind::Antipodal);
  CHECK(classifyPair(topo, 0, 0b111).kind == CommodityKind::Far);
  CHECK(classifyPair(topo, 0, 0b11).kind == CommodityKind::Near);
  CHECK_THROWS_AS(classifyPair(topo, 3, 3), std::domain_error);
}

TEST_CASE("pair designs") {
  for (int d = 2; d <= 7; ++d) {
    const PairDesign p = allPairsDesign(CubeTopology(d), 64, 1);
    const double n = std::ldexp(1.0, d);
    CHECK_FALSE(p.sampled);
    CHECK(static_cast<double>(p.pairs.size()) == n * (n - 1) / 2);
  }
  const PairDesign s = allPairsDesign(CubeTopology(9), 16, 1);
  CHECK(s.sampled);
  double total = 0.0;
  for (double w : s.weights) total += w;
  CHECK(total == doctest::Approx(512.0 * 511.0 / 2));
  CHECK(allPairsDesign(CubeTopology(9), 16, 1).pairs == s.pairs);
}

TEST_CASE("all capacities one") {
  for (int d = 7; d <= 9; ++d) {
    CAPTURE(d);
    const CapacityNetwork net = ones(d);
    const UniformFlowSolution sol = solveUniform(net, PairMode::Opp, {}, {true, {}});
    CHECK(sol.failures.empty());
    CHECK(sol.phi >= 0.9);
    CHECK(sol.auditPassed);
    CHECK(sol.middleHypothesisFailures == 0);
    checkFinalFlows(net, sol);
  }
}

TEST_CASE("an isolated vertex is reported and forces phi = 0") {
  CapacityNetwork net = ones(7);
  for (int i = 0; i < 7; ++i) net.cap[static_cast<Eigen::Index>(net.topo.edgeIndex(0, i))] = 0.0;
  const UniformFlowSolution sol = solveUniform(net, PairMode::Opp, {}, {true, {}});
  CHECK(sol.phi == 0.0);
  REQUIRE_FALSE(sol.failures.empty());
  bool named = false;
  for (const CommodityFailure& f : sol.failures) named |= f.u == 0 || f.v == 0;
  CHECK(named);
  for (const DirectedFlow& f : sol.flows) CHECK(f.signedValues().isZero(0.0));
}

TEST_CASE("far and near pairs") {
  const CapacityNetwork net = ones(8);
  SUBCASE("far pair at distance 5") {
    const CommodityResult r = buildFarPair(net, 0, 0b11111, {});
    CHECK(r.volume >= 0.9 * std::ldexp(1.0, 1 - 8));
    const BalanceReport b = balanceReport(r.flow, {0}, {0b11111});
    CHECK(b.volume == doctest::Approx(r.volume));
    // only coordinates that differ are used
    for (std::size_t i = 0; i < net.topo.edgeCount(); ++i)
      if (r.flow.signedValues()[static_cast<Eigen::Index>(i)] != 0.0) {
        const EdgeId e = net.topo.edgeAt(i);
        CHECK(e.dim < 5);
        CHECK((e.lower >> 5) == 0);
      }
  }
  SUBCASE("near pair routes through the antipodes") {
    const CommodityResult r = buildNearPair(net, 0, 0b11, {});
    CHECK(r.volume > 0.0);
    const BalanceReport b = balanceReport(r.flow, {0}, {0b11});
    CHECK(b.interiorImbalance <= kProperTolerance * std::max(1.0, b.size));
  }
  SUBCASE("preconditions") {
    CHECK_THROWS_AS(buildNearPair(net, 0, 0b11111, {}), std::domain_error);
    CHECK_THROWS_AS(buildNearPair(net, 5, 5, {}), std::domain_error);
    CHECK_THROWS_AS(buildFarPair(net, 0, 0b11, {}), std::domain_error);
  }
}

TEST_CASE("random capacities stay feasible") {
  for (const char* law : {"bernoulli:0.75", "uniform01"}) {
    CAPTURE(law);
    const CapacityNetwork net = sample(CapacityDistribution::parse(law), CubeTopology(7), 3);
    const UniformFlowSolution opp = solveUniform(net, PairMode::Opp, {}, {true, {}});
    checkFinalFlows(net, opp);
    CHECK(opp.phi >= 0.0);
    CHECK(opp.commodities.size() == 64);
    const UniformFlowSolution all = solveUniform(net, PairMode::All, {}, {true, {}});
    checkFinalFlows(net, all);
    CHECK(all.commodities.size() == 128 * 127 / 2);
  }
}

TEST_CASE("deadline") {
  SolveOptions o;
  o.deadline = std::chrono::steady_clock::now() - std::chrono::seconds(1);
  CHECK_THROWS_AS(solveUniform(ones(7), PairMode::Opp, {}, o), DeadlineExceeded);
}
