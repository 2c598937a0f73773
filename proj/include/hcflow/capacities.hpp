#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "hcflow/hypercube.hpp"

namespace hcflow {

struct Atom {
  double value = 0.0;
  double prob = 0.0;

  friend bool operator==(const Atom&, const Atom&) = default;
};

class CapacityDistribution {
 public:
  enum class Kind { Bernoulli, ScaledBernoulli, FiniteDiscrete, Uniform01 };

  static CapacityDistribution bernoulli(double p);
  static CapacityDistribution scaledBernoulli(double a, double p);
  static CapacityDistribution finiteDiscrete(std::vector<Atom> atoms);
  static CapacityDistribution uniform01();
  // "bernoulli:0.75", "scaled:2:0.5", "finite:0:0.25,1:0.75", "uniform01"
  static CapacityDistribution parse(const std::string& text);

  Kind kind() const { return kind_; }
  bool isFinite() const { return kind_ != Kind::Uniform01; }
  double mean() const;
  // inverse CDF; the open event of bernoulli(p) is u >= 1 - p
  double quantile(double u) const;
  // Pr[C >= c]
  double survival(double c) const;
  // atoms for the finite kinds (bernoulli expands to {(0, 1-p), (1, p)})
  std::vector<Atom> atoms() const;
  std::string toString() const;

  friend bool operator==(const CapacityDistribution&, const CapacityDistribution&) = default;

 private:
  Kind kind_ = Kind::Bernoulli;
  double a_ = 1.0;
  double p_ = 1.0;
  std::vector<Atom> atoms_;
  std::vector<double> cumulative_;
};

inline constexpr int kGeneratorVersion = 1;

struct CapacityNetwork {
  CubeTopology topo{1};
  Eigen::VectorXd cap;  // indexed by canonical edge index
  CapacityDistribution dist;
  std::uint64_t seed = 0;
  int generatorVersion = kGeneratorVersion;

  double capacity(EdgeId e) const { return cap[static_cast<Eigen::Index>(topo.edgeIndex(e))]; }
  double averageCapacity() const { return cap.mean(); }
};

CapacityNetwork sample(const CapacityDistribution& dist, const CubeTopology& topo,
                       std::uint64_t seed);

// Wrap explicit capacities (validated: length d 2^{d-1}, finite, nonnegative).
CapacityNetwork networkFromCapacities(const CubeTopology& topo, Eigen::VectorXd cap,
                                      const CapacityDistribution& dist, std::uint64_t seed);

struct Truncation {
  double cStar = 0.0;
  double pStar = 0.0;
};

Truncation truncateToBernoulli(const CapacityDistribution& dist);

// c* 1{c_e >= c*}
Eigen::VectorXd truncatedCapacities(const CapacityNetwork& net, const Truncation& t);

CapacityDistribution discretize(const CapacityDistribution& dist, double eps);

// The coupling used by discretize: a capacity drawn from dist maps to its discretized value.
double discretizeValue(const CapacityDistribution& dist, double eps, double c);

Eigen::VectorXd discretizedCapacities(const CapacityNetwork& net, double eps);

}  // namespace hcflow
