#include "doctest.h"

#include <cmath>

#include "hcflow/netscale.hpp"

using namespace hcflow;

namespace {

CapacityNetwork ones(int d) {
  CubeTopology topo(d);
  return networkFromCapacities(topo, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(topo.edgeCount())),
                               CapacityDistribution::bernoulli(1.0), 0);
}

}  // namespace

TEST_CASE("radius rule") {
  CHECK(effectiveEll(16, {}) == 5);
  CHECK(effectiveEll(7, {}) == 1);
  CHECK(effectiveEll(12, {}) == 3);
  CHECK(effectiveEll(3, {}) == 1);
  ScalingParams p;
  p.ellOverride = 2;
  CHECK(effectiveEll(9, p) == 2);
  p.ellOverride = 10;
  CHECK_THROWS_AS(effectiveEll(9, p), std::domain_error);
}

TEST_CASE("scaled capacities") {
  const CapacityNetwork base = ones(16);
  const ScaledNetwork net = ScaledNetwork::antipodal(base, 0, ScalingParams{0.6, 7.0, {}});
  REQUIRE(net.ell() == 5);
  // lower at layer 7, upper at layer 8
  CHECK(scaledCapacity(net, EdgeId{0b01111111, 7}) == doctest::Approx(1.0 / 102960).epsilon(1e-14));
  CHECK(scaledCapacity(net, EdgeId{0b1, 1}) == doctest::Approx(7.0 / 240).epsilon(1e-14));

  const ScaledNetwork sub = ScaledNetwork::between(base, 0, base.topo.fullMask(), ScalingParams{0.6, 7.0, {}});
  const EdgeId mid{0b01111111, 7};
  CHECK(scaledCapacity(sub, mid) == doctest::Approx(std::ldexp(1.0, -15) * scaledCapacity(net, mid)).epsilon(1e-14));

  const ScaledNetwork face = ScaledNetwork::between(base, 0, 0b0110, ScalingParams{});
  CHECK(scaledCapacity(face, EdgeId{0b0000, 0}) == 0.0);  // coordinate 0 is not free
  CHECK(scaledCapacity(face, EdgeId{0b1000, 1}) == 0.0);  // lies off the face
  CHECK(scaledCapacity(face, EdgeId{0b0000, 1}) > 0.0);
}

TEST_CASE("scaled capacity is homogeneous and monotone in c_e") {
  CubeTopology topo(8);
  const CapacityNetwork base = sample(CapacityDistribution::uniform01(), topo, 4);
  CapacityNetwork doubled = base;
  doubled.cap *= 2.0;
  const auto a = scaledCapacities(ScaledNetwork::antipodal(base, 3, {}));
  const auto b = scaledCapacities(ScaledNetwork::antipodal(doubled, 3, {}));
  CHECK((b - 2.0 * a).cwiseAbs().maxCoeff() <= 1e-15);
  CapacityNetwork raised = base;
  raised.cap.array() += 0.25;
  const auto c = scaledCapacities(ScaledNetwork::antipodal(raised, 3, {}));
  CHECK((c.array() >= a.array()).all());
}

TEST_CASE("antipodal superposition audit") {
  for (int d = 7; d <= 10; ++d) {
    CAPTURE(d);
    const CapacityNetwork base = sample(CapacityDistribution::uniform01(), CubeTopology(d), 11);
    for (double M : {1.0, 7.0}) {
      const AntipodalAudit audit = auditAntipodalSuperposition(base, ScalingParams{0.6, M, {}});
      const double eps = 2.0 * (M - 1.0) * (audit.ell + 2) / d;
      CHECK(audit.epsD == doctest::Approx(eps));
      CHECK((audit.part1 - 2.0 * base.cap).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK((audit.demand - (1.0 + eps) * base.cap).cwiseAbs().maxCoeff() <= 1e-12);
      if (M == 1.0) CHECK((audit.demand - base.cap).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
  CHECK_THROWS_AS(auditAntipodalSuperposition(ones(5), {}), std::domain_error);
}

TEST_CASE("audit agrees with summing every antipodal network") {
  const CapacityNetwork base = sample(CapacityDistribution::bernoulli(0.75), CubeTopology(7), 2);
  const ScalingParams p{0.6, 7.0, {}};
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(base.cap.size());
  for (Vertex u = 0; u < base.topo.vertexCount(); ++u) sum += scaledCapacities(ScaledNetwork::antipodal(base, u, p));
  CHECK((0.5 * sum - auditAntipodalSuperposition(base, p).demand).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("subcube superposition audit") {
  // sum_k (k/d) C(d,k) 2^{1-d} = 1
  for (int d = 1; d <= 12; ++d) {
    double s = 0.0;
    for (int k = 1; k <= d; ++k) s += static_cast<double>(k) / d * static_cast<double>(binomial(d, k)) * std::ldexp(1.0, 1 - d);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
  }
  for (int d = 4; d <= 9; ++d) {
    CAPTURE(d);
    const CapacityNetwork base = sample(CapacityDistribution::uniform01(), CubeTopology(d), 8);
    const SubcubeAudit audit = auditSubcubeSuperposition(base, {});
    CHECK((audit.allPairs - base.cap).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((audit.farMiddle.array() <= base.cap.array() * (1.0 + 1e-12)).all());
  }
  CHECK_THROWS_AS(auditSubcubeSuperposition(ones(kSubcubeAuditMaxDim + 1), {}), std::domain_error);
}

TEST_CASE("single full-dimensional pair is the antipodal network times 2^{1-d}") {
  const CapacityNetwork base = sample(CapacityDistribution::uniform01(), CubeTopology(8), 6);
  const Vertex u = 0b10100101;
  const auto a = scaledCapacities(ScaledNetwork::antipodal(base, u, {}));
  const auto s = scaledCapacities(ScaledNetwork::between(base, u, base.topo.antipode(u), {}));
  CHECK((s - std::ldexp(1.0, -7) * a).cwiseAbs().maxCoeff() <= 1e-16);
}

TEST_CASE("near and far pairs") {
  CHECK(isFarPair(8, 3));
  CHECK_FALSE(isFarPair(8, 2));
  CHECK(pairEll(3, 5) == 2);
  CHECK(pairEll(1, 5) == 1);
}
