// Acceptance run: one PASS/FAIL line per criterion. Arguments select criteria by number
// (default: all). The exit status is nonzero only when a criterion could not be evaluated.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "flowgen.hpp"
#include "hcflow/assemble.hpp"
#include "hcflow/capacities.hpp"
#include "hcflow/escape.hpp"
#include "hcflow/experiment.hpp"
#include "hcflow/netscale.hpp"
#include "hcflow/oracle.hpp"
#include "oracles.hpp"

using namespace hcflow;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds(Clock::time_point since) { return std::chrono::duration<double>(Clock::now() - since).count(); }

std::string fmt(double x, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << x;
  return s.str();
}

CapacityNetwork ones(int d) { return sample(CapacityDistribution::bernoulli(1.0), CubeTopology(d), 1); }

Verdict antipodalIdentity() {
  double worst = 0.0, timeAt12 = 0.0;
  for (int d = 7; d <= 12; ++d) {
    const CapacityNetwork base = sample(CapacityDistribution::uniform01(), CubeTopology(d), 100 + d);
    for (double M : {1.0, 7.0}) {
      const auto start = Clock::now();
      const AntipodalAudit a = auditAntipodalSuperposition(base, ScalingParams{0.6, M, {}});
      if (d == 12) timeAt12 += seconds(start);
      const double eps = 2.0 * (M - 1.0) * (a.ell + 2) / d;
      for (Eigen::Index e = 0; e < base.cap.size(); ++e) {
        const double want = (1.0 + eps) * base.cap[e];
        const double rel = want > 0.0 ? std::abs(a.demand[e] - want) / want : std::abs(a.demand[e]);
        worst = std::max(worst, rel);
      }
    }
  }
  return {worst <= 1e-10 && timeAt12 < 30.0,
          "max relative error " + fmt(worst) + ", d = 12 audits " + fmt(timeAt12) + " s"};
}

Verdict dominance() {
  const int dims[] = {2, 3, 4, 5, 6, 7, 8, 8, 9, 10};
  const char* laws[] = {"bernoulli:0.75", "uniform01"};
  int checked = 0, violations = 0, exceptions = 0;
  std::string first;
  auto over = [&](double phi, double bound, const std::string& what) {
    if (phi > bound * (1.0 + 1e-9) + 1e-12) {
      ++violations;
      if (first.empty()) first = what + " " + fmt(phi, 10) + " > " + fmt(bound, 10);
    }
  };
  for (int i = 0; i < 200; ++i) {
    const int d = dims[i % 10];
    const std::string law = laws[(i / 10) % 2];
    try {
      const CapacityNetwork net = sample(CapacityDistribution::parse(law), CubeTopology(d), 1000 + i);
      const double cav = net.averageCapacity();
      ConcurrentOptions co;
      co.omega = 0.05;
      co.timeLimitSeconds = 2.0;
      over(solveUniform(net, PairMode::Opp, {}).phi, cav, "opp constructive");
      over(maxConcurrentUniform(net, PairSet::opp(), co).phi, cav, "opp oracle");
      if (d <= kOracleAllMaxDim) {
        const double allBound = std::ldexp(cav, 1 - d);
        over(solveUniform(net, PairMode::All, {}).phi, allBound, "all constructive");
        over(maxConcurrentUniform(net, PairSet::all(), co).phi, allBound, "all oracle");
      }
      ++checked;
    } catch (const std::exception& e) {
      ++exceptions;
      if (first.empty()) first = e.what();
    }
  }
  return {violations == 0 && exceptions == 0,
          std::to_string(checked) + " instances, " + std::to_string(violations) + " bound violations, " +
              std::to_string(exceptions) + " exceptions" + (first.empty() ? "" : " (" + first + ")")};
}

Verdict stitching() {
  std::mt19937_64 rng(31337);
  int failures = 0;
  std::string first;
  double maxTheta = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const flowgen::StitchTrial t = flowgen::stitchTrial(8, rng);
    maxTheta = std::max(maxTheta, t.theta);
    if (!t.ok || !(t.theta < 1.0 / 9.0)) {
      ++failures;
      if (first.empty()) first = t.why;
    }
  }
  return {failures == 0, "1000 trials, " + std::to_string(failures) + " failures, max theta " + fmt(maxTheta) +
                             (first.empty() ? "" : " (" + first + ")")};
}

Verdict roundTrip() {
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<int> pickD(2, 8), pickN(1, 40);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const CubeTopology topo(pickD(rng));
    const auto st = flowgen::randomTerminals(topo, 5, rng);
    const DirectedFlow f = flowgen::randomProperFlow(topo, st, pickN(rng), pickN(rng) / 4, rng);
    const Eigen::VectorXd back = flowgen::recombineByHand(topo, decompose(f, st.S, st.T));
    worst = std::max(worst, (back - f.signedValues()).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-9, "1000 flows, max per-edge error " + fmt(worst)};
}

Verdict deterministicPipeline() {
  bool ok = true;
  std::string detail;
  for (int d = 7; d <= 10; ++d) {
    const CapacityNetwork net = ones(d);
    const CommodityResult r = buildAntipodal(net, 0, {});
    const double phi = solveUniform(net, PairMode::Opp, {}).phi;
    const bool good = r.volume >= 1.0 - 2.0 / (d * d) && r.finalMu <= 1e-9 && phi >= 0.9;
    ok = ok && good;
    detail += "d=" + std::to_string(d) + ": vol " + fmt(r.volume, 6) + " mu " + fmt(r.finalMu, 2) + " phi " +
              fmt(phi, 6) + (d < 10 ? "; " : "");
  }
  return {ok, detail};
}

Verdict oracleVsLp() {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> pickD(1, 3);
  const char* laws[] = {"uniform01", "bernoulli:0.75", "finite:0.5:0.5,1:0.5", "scaled:2:0.8"};
  double worst = 0.0;
  int bad = 0;
  for (int i = 0; i < 50; ++i) {
    const int d = pickD(rng);
    const CapacityNetwork net = sample(CapacityDistribution::parse(laws[i % 4]), CubeTopology(d), rng());
    const PairSet ps = i % 2 ? PairSet::all() : PairSet::opp();
    const double lp = oracles::exhaustiveConcurrentLp(net.topo, net.cap, ps.enumerate(net.topo));
    ConcurrentOptions co;
    co.omega = 0.02;
    const double phi = maxConcurrentUniform(net, ps, co).phi;
    const double gap = lp > 0.0 ? (lp - phi) / lp : std::abs(phi);
    worst = std::max(worst, gap);
    bad += phi > lp + 1e-9 || gap > 0.02;
  }
  return {bad == 0, "50 instances, worst relative shortfall " + fmt(worst) + ", " + std::to_string(bad) + " outside omega"};
}

Verdict theorem1Trend() {
  const auto start = Clock::now();
  const double meanC = 0.75;
  std::vector<double> oracleMed, consMed;
  std::string detail;
  for (int d = 7; d <= 11; ++d) {
    std::vector<double> orc, cons;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const CapacityNetwork net = sample(CapacityDistribution::bernoulli(0.75), CubeTopology(d), seed);
      cons.push_back(solveUniform(net, PairMode::Opp, {}).phi);
      ConcurrentOptions co;
      co.omega = 0.05;
      co.timeLimitSeconds = d >= 11 ? 12.0 : d == 10 ? 10.0 : 0.0;
      orc.push_back(maxConcurrentUniform(net, PairSet::opp(), co).phi);
    }
    oracleMed.push_back(median(orc));
    consMed.push_back(median(cons));
    detail += "d=" + std::to_string(d) + " oracle " + fmt(oracleMed.back()) + " constructive " + fmt(consMed.back()) + "; ";
  }
  const double elapsed = seconds(start);
  const bool monotone = std::is_sorted(oracleMed.begin(), oracleMed.end());
  const bool reaches = oracleMed.back() >= 0.85 * meanC;
  detail += "nondecreasing " + std::string(monotone ? "yes" : "no") + ", " + fmt(elapsed, 4) + " s";
  return {monotone && reaches && elapsed < 15 * 60, detail};
}

Verdict theorem2Trend() {
  std::vector<double> scaled;
  std::string detail;
  bool bounded = true;
  for (int d = 5; d <= 7; ++d) {
    std::vector<double> orc, cons;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const CapacityNetwork net = sample(CapacityDistribution::bernoulli(0.75), CubeTopology(d), seed);
      ConcurrentOptions co;
      co.omega = 0.02;
      const double phi = maxConcurrentUniform(net, PairSet::all(), co).phi;
      bounded = bounded && phi <= std::ldexp(net.averageCapacity(), 1 - d) * (1.0 + 1e-9);
      orc.push_back(std::ldexp(phi, d - 1));
      cons.push_back(std::ldexp(solveUniform(net, PairMode::All, {}).phi, d - 1));
    }
    scaled.push_back(median(orc));
    detail += "d=" + std::to_string(d) + " oracle " + fmt(scaled.back()) + " constructive " + fmt(median(cons)) + "; ";
  }
  const bool monotone = std::is_sorted(scaled.begin(), scaled.end());
  detail += "nondecreasing " + std::string(monotone ? "yes" : "no") + ", bounded " + (bounded ? "yes" : "no");
  return {monotone && bounded, detail};
}

Verdict couplings() {
  const std::vector<std::string> laws = {"uniform01", "bernoulli:0.75", "scaled:2:0.6", "finite:0:0.3,0.5:0.2,2:0.5"};
  const double eps = 0.05;
  int instances = 0, orderViolations = 0;
  double worstGap = 0.0, worstTruncZ = 0.0;
  for (const std::string& law : laws) {
    const CapacityDistribution dist = CapacityDistribution::parse(law);
    const Truncation t = truncateToBernoulli(dist);
    for (int d = 6; d <= 12; d += 2)
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const CapacityNetwork net = sample(dist, CubeTopology(d), seed);
        const Eigen::VectorXd star = truncatedCapacities(net, t);
        const Eigen::VectorXd disc = discretizedCapacities(net, eps);
        orderViolations += static_cast<int>((star.array() > net.cap.array()).count());
        orderViolations += static_cast<int>((disc.array() > net.cap.array()).count());
        worstGap = std::max(worstGap, net.cap.mean() - disc.mean());
        const double n = static_cast<double>(net.cap.size());
        const double sd = t.cStar * std::sqrt(t.pStar * (1 - t.pStar) / n);
        if (sd > 0.0) worstTruncZ = std::max(worstTruncZ, std::abs(star.mean() - t.cStar * t.pStar) / sd);
        ++instances;
      }
  }
  return {orderViolations == 0 && worstGap < eps && worstTruncZ <= 5.0,
          std::to_string(instances) + " instances, " + std::to_string(orderViolations) +
              " ordering violations, max discretisation mean gap " + fmt(worstGap) + " (eps " + fmt(eps) +
              "), truncation mean within " + fmt(worstTruncZ, 3) + " sd of c* p*"};
}

Verdict connectivityRate() {
  std::string detail;
  bool ok = true;
  for (int d = 8; d <= 12; ++d) {
    int good = 0;
    double worst = 0.0;
    std::size_t t1 = 0, t2 = 0, t3 = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const CapacityNetwork net = sample(CapacityDistribution::bernoulli(0.75), CubeTopology(d), seed);
      const LocalConnectivityReport r = classifyLocalConnectivity(net.topo, openEdges(net.cap, 1.0), 0.2);
      const double frac = r.poorlyConnectedFraction();
      t1 += r.T1.size();
      t2 += r.T2.size();
      t3 += r.T3.size();
      good += frac <= 0.01;
      worst = std::max(worst, frac);
    }
    ok = ok && good >= 18;
    detail += "d=" + std::to_string(d) + " " + std::to_string(good) + "/20 (worst " + fmt(worst, 3) + ", T1/T2/T3 " +
              std::to_string(t1) + "/" + std::to_string(t2) + "/" + std::to_string(t3) + "); ";
  }
  std::mt19937_64 rng(606);
  std::uniform_int_distribution<int> pickD(3, 6);
  std::uniform_real_distribution<double> pickP(0.4, 0.95);
  int agree = 0;
  for (int i = 0; i < 100; ++i) {
    const CubeTopology topo(pickD(rng));
    const OpenSet open = openEdges(sample(CapacityDistribution::bernoulli(pickP(rng)), topo, rng()).cap, 1.0);
    agree += classifyLocalConnectivity(topo, open, 0.2).failed == oracles::bruteConnectivity(topo, open, 0.2);
  }
  detail += "brute-force agreement " + std::to_string(agree) + "/100";
  return {ok && agree == 100, detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"antipodal superposition identity", antipodalIdentity},
      {"upper-bound dominance", dominance},
      {"stitching contract", stitching},
      {"decomposition round-trip", roundTrip},
      {"deterministic pipeline at p = 1", deterministicPipeline},
      {"oracle against exhaustive LP", oracleVsLp},
      {"opp trend toward E[C]", theorem1Trend},
      {"all-pairs trend toward E[C]", theorem2Trend},
      {"truncation and discretisation couplings", couplings},
      {"local connectivity rate", connectivityRate},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  int passed = 0, run = 0, errors = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!wanted.empty() && !wanted.count(id)) continue;
    const auto start = Clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
      ++errors;
    }
    ++run;
    passed += v.pass;
    std::cout << "criterion " << id << " " << (v.pass ? "PASS" : "FAIL") << ": " << criteria[i].first << " -- "
              << v.detail << " [" << fmt(seconds(start), 4) << " s]" << std::endl;
  }
  std::cout << passed << " of " << run << " criteria pass" << std::endl;
  return errors ? 1 : 0;
}
