#include "doctest.h"

#include <cmath>
#include <random>

#include "hcflow/capacities.hpp"
#include "hcflow/escape.hpp"
#include "oracles.hpp"

using namespace hcflow;

namespace {

OpenSet allOpen(const CubeTopology& topo) { return OpenSet(topo.edgeCount(), 1); }

void close(const CubeTopology& topo, OpenSet& open, Vertex x, Vertex y) { open[topo.edgeIndex(topo.edgeBetween(x, y))] = 0; }

OpenSet randomOpen(const CubeTopology& topo, double p, std::uint64_t seed) {
  return openEdges(sample(CapacityDistribution::bernoulli(p), topo, seed).cap, 1.0);
}

}  // namespace

TEST_CASE("classification examples") {
  for (int d = 3; d <= 8; ++d) {
    const CubeTopology topo(d);
    const LocalConnectivityReport r = classifyLocalConnectivity(topo, allOpen(topo), 0.4);
    CHECK(r.poorlyConnectedCount() == 0);
    CHECK(r.T1.empty());
  }
  const CubeTopology topo(5);
  OpenSet open = allOpen(topo);
  for (Vertex v : neighbors(topo, 9)) close(topo, open, 9, v);
  const LocalConnectivityReport r = classifyLocalConnectivity(topo, open, 0.2);
  CHECK(std::find(r.T1.begin(), r.T1.end(), Vertex{9}) != r.T1.end());
  CHECK_THROWS_AS(vertexConnectivity(topo, open, 0, 1.0), std::domain_error);
}

TEST_CASE("classification agrees with brute-force enumeration") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> pickD(3, 6);
  std::uniform_real_distribution<double> pickP(0.4, 0.95);
  for (int trial = 0; trial < 40; ++trial) {
    const CubeTopology topo(pickD(rng));
    const OpenSet open = randomOpen(topo, pickP(rng), rng());
    for (double alpha : {0.2, 0.34}) {
      const auto mine = classifyLocalConnectivity(topo, open, alpha);
      CHECK(mine.failed == oracles::bruteConnectivity(topo, open, alpha));
    }
  }
}

TEST_CASE("neighbour escape") {
  SUBCASE("everything open") {
    const CubeTopology topo(6);
    const EscapePlan plan = buildNeighborEscape(topo, allOpen(topo), 5, 0.2);
    CHECK(plan.S1.size() == 6);
    CHECK(plan.S3.empty());
    CHECK(plan.Sstar.empty());
    for (Vertex v : neighbors(topo, 5)) CHECK(plan.flow.along(5, v) == doctest::Approx(1.0 / 6));
    CHECK((plan.flow.usage().array() > 0.0).count() == 6);
  }
  SUBCASE("a closed incident edge is bypassed by 3-paths") {
    const CubeTopology topo(8);
    OpenSet open = allOpen(topo);
    close(topo, open, 0, 1);
    const double alpha = 0.2;
    const EscapePlan plan = buildNeighborEscape(topo, open, 0, alpha);
    REQUIRE(plan.S3 == std::vector<Vertex>{1});
    const int need = static_cast<int>(std::ceil(alpha * 8));
    // each detour leaves through a distinct first hop carrying 1/(d need) on top of its own 1/d
    int detours = 0;
    for (int j = 1; j < 8; ++j) {
      const double extra = plan.flow.along(0, Vertex{1} << j) - 1.0 / 8;
      if (extra > 1e-15) {
        CHECK(extra == doctest::Approx(1.0 / (8.0 * need)));
        ++detours;
      }
    }
    CHECK(detours == need);
    const BalanceReport b = balanceReport(plan.flow, {0}, neighbors(topo, 0));
    CHECK(b.mu <= 1e-9);
    CHECK(b.interiorImbalance <= 1e-9);
  }
  SUBCASE("a neighbour reached only through the matching") {
    // u = 0, v = 1: the edge uv is closed and v keeps a single other edge (to 3), so only one
    // open 3-path reaches v and it has to be served through a matched pair
    const CubeTopology topo(6);
    OpenSet open = allOpen(topo);
    close(topo, open, 0, 1);
    for (int a = 2; a < 6; ++a) close(topo, open, 1, 1 ^ (Vertex{1} << a));
    REQUIRE(vertexConnectivity(topo, open, 0, 0.2).failed == 0);
    const EscapePlan plan = buildNeighborEscape(topo, open, 0, 0.2);
    CHECK(plan.Sstar == std::vector<Vertex>{1});
    const BalanceReport b = balanceReport(plan.flow, {0}, neighbors(topo, 0));
    CHECK(b.volume == doctest::Approx(1.0));
    CHECK(b.mu <= 1e-9);
    CHECK(b.interiorImbalance <= 1e-9);
    CHECK(plan.flow.along(0, 2) == doctest::Approx(2.0 / 6));
  }
  SUBCASE("poorly connected sources are refused") {
    const CubeTopology topo(6);
    OpenSet open = allOpen(topo);
    for (Vertex v : neighbors(topo, 0)) close(topo, open, 0, v);
    CHECK_THROWS_AS(buildNeighborEscape(topo, open, 0, 0.2), EscapeError);
  }
}

TEST_CASE("shell propagation") {
  SUBCASE("radius 1 is the neighbour escape") {
    const CubeTopology topo(6);
    const auto a = propagateToShell(topo, allOpen(topo), 0, 1, 0.2);
    const auto b = buildNeighborEscape(topo, allOpen(topo), 0, 0.2);
    CHECK((a.flow.signedValues() - b.flow.signedValues()).cwiseAbs().maxCoeff() <= 1e-15);
  }
  SUBCASE("radius 2 on the open 6-cube reaches every shell vertex equally") {
    const CubeTopology topo(6);
    const EscapePlan plan = propagateToShell(topo, allOpen(topo), 0, 2, 0.2);
    for (Vertex w : layerVertices(Frame::whole(topo, 0), 2)) CHECK(netOutflow(plan.flow, w) == doctest::Approx(-1.0 / 15));
  }
  SUBCASE("layer recursion identity") {
    for (int d = 2; d <= 20; ++d)
      for (int m = 1; m <= d; ++m)
        CHECK(static_cast<double>(m) / ((d - m + 1) * static_cast<double>(binomial(d, m - 1))) ==
              doctest::Approx(1.0 / static_cast<double>(binomial(d, m))).epsilon(1e-14));
  }
  SUBCASE("random instances stay balanced") {
    const CubeTopology topo(10);
    int built = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const OpenSet open = randomOpen(topo, 0.75, seed);
      const Vertex u = static_cast<Vertex>(seed * 37 % 1024);
      try {
        const EscapePlan plan = propagateToShell(topo, open, u, 2, 0.2);
        const BalanceReport b = balanceReport(plan.flow, {u}, layerVertices(Frame::whole(topo, u), 2));
        CHECK(b.mu <= 1e-9);
        CHECK(b.interiorImbalance <= 1e-9);
        CHECK(b.volume == doctest::Approx(1.0).epsilon(1e-12));
        // nothing is routed over a closed edge
        const Eigen::VectorXd use = plan.flow.usage();
        for (std::size_t i = 0; i < topo.edgeCount(); ++i)
          if (use[static_cast<Eigen::Index>(i)] > 0.0) CHECK(open[i] != 0);
        ++built;
      } catch (const EscapeError& e) {
        CHECK_FALSE(e.vertices().empty());
      }
    }
    MESSAGE("plans built on " << built << " of 20 seeds");
  }
}

TEST_CASE("subcube splits") {
  const CubeTopology topo(8);
  const EscapePlan plan = propagateToShell(topo, allOpen(topo), 0, 2, 0.2);

  SUBCASE("allocation over all far targets") {
    std::vector<Vertex> far;
    for (Vertex v = 1; v < 256; ++v)
      if (isFarPair(8, popcount(v))) far.push_back(v);
    const auto split = splitToSubcubeBoundaries(plan, far);
    DirectedFlow total(topo);
    for (const auto& [v, f] : split) total += f;
    double farShare = 0.0;
    for (int k = 3; k <= 8; ++k) farShare += static_cast<double>(binomial(8, k)) / 256.0;
    for (Vertex w : layerVertices(Frame::whole(topo, 0), 2)) {
      CHECK(-netOutflow(total, w) == doctest::Approx(farShare / 28).epsilon(1e-12));
      CHECK(-netOutflow(total, w) <= 1.0 / 28);
    }
    // no cancellation between slices: summed magnitudes stay under the plan, edge by edge
    Eigen::VectorXd summed = Eigen::VectorXd::Zero(plan.flow.signedValues().size());
    for (const auto& [v, f] : split) {
      summed += f.usage();
      CHECK((f.signedValues().array() * plan.flow.signedValues().array() >= 0.0).all());
    }
    CHECK((summed.array() <= plan.flow.usage().array() + 1e-12).all());
    for (const auto& [v, f] : split) {
      const BalanceReport b = balanceReport(f, {0}, boundarySet(topo, 0, v, 2));
      CHECK(b.volume == doctest::Approx(1.0 / 256).epsilon(1e-12));
      CHECK(b.mu <= 1e-9);
    }
  }
  SUBCASE("the antipode takes 2^{-d} of the whole plan") {
    const auto split = splitToSubcubeBoundaries(plan, {255});
    CHECK((split.at(255).signedValues() - plan.flow.signedValues() / 256.0).cwiseAbs().maxCoeff() <= 1e-15);
  }
  SUBCASE("disjoint boundary sets give disjoint shell support") {
    const EscapePlan one = propagateToShell(topo, allOpen(topo), 0, 1, 0.2);
    const auto split = splitToSubcubeBoundaries(one, {0b00001111, 0b11110000});
    for (int i = 0; i < 8; ++i) {
      const Vertex w = Vertex{1} << i;
      const double a = netOutflow(split.at(0b00001111), w), b = netOutflow(split.at(0b11110000), w);
      CHECK((a == 0.0 || b == 0.0));
      CHECK((i < 4 ? a : b) < 0.0);
    }
  }
}
