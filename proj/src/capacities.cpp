#include "hcflow/capacities.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hcflow/rng.hpp"

namespace hcflow {

namespace {

void requireProbability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("probability outside [0, 1]");
}

std::string formatReal(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

double parseReal(const std::string& s) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: '" + s + "'");
  }
  if (used != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
  return x;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

CapacityDistribution CapacityDistribution::bernoulli(double p) {
  requireProbability(p);
  CapacityDistribution d;
  d.kind_ = Kind::Bernoulli;
  d.a_ = 1.0;
  d.p_ = p;
  return d;
}

CapacityDistribution CapacityDistribution::scaledBernoulli(double a, double p) {
  requireProbability(p);
  if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("scaled Bernoulli needs a > 0");
  CapacityDistribution d;
  d.kind_ = Kind::ScaledBernoulli;
  d.a_ = a;
  d.p_ = p;
  return d;
}

CapacityDistribution CapacityDistribution::finiteDiscrete(std::vector<Atom> atoms) {
  if (atoms.empty()) throw std::invalid_argument("finite distribution needs at least one atom");
  double total = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const Atom& a = atoms[i];
    if (!(a.value >= 0.0) || !std::isfinite(a.value))
      throw std::invalid_argument("atom values must be finite and nonnegative");
    requireProbability(a.prob);
    if (i > 0 && !(a.value > atoms[i - 1].value))
      throw std::invalid_argument("atom values must be strictly increasing");
    total += a.prob;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("atom probabilities must sum to 1");
  CapacityDistribution d;
  d.kind_ = Kind::FiniteDiscrete;
  d.atoms_ = std::move(atoms);
  double acc = 0.0;
  for (const Atom& a : d.atoms_) {
    acc += a.prob;
    d.cumulative_.push_back(acc);
  }
  return d;
}

CapacityDistribution CapacityDistribution::uniform01() {
  CapacityDistribution d;
  d.kind_ = Kind::Uniform01;
  return d;
}

CapacityDistribution CapacityDistribution::parse(const std::string& text) {
  const auto parts = split(text, ':');
  const std::string& name = parts[0];
  if (name == "uniform01" && parts.size() == 1) return uniform01();
  if (name == "bernoulli" && parts.size() == 2) return bernoulli(parseReal(parts[1]));
  if (name == "scaled" && parts.size() == 3)
    return scaledBernoulli(parseReal(parts[1]), parseReal(parts[2]));
  if (name == "finite" && parts.size() >= 2) {
    const std::string body = text.substr(name.size() + 1);
    std::vector<Atom> atoms;
    for (const auto& item : split(body, ',')) {
      const auto vp = split(item, ':');
      if (vp.size() != 2) throw std::invalid_argument("finite atoms are value:prob pairs");
      atoms.push_back(Atom{parseReal(vp[0]), parseReal(vp[1])});
    }
    return finiteDiscrete(std::move(atoms));
  }
  throw std::invalid_argument("unrecognised distribution '" + text +
                              "' (bernoulli:p, scaled:a:p, finite:v:p,..., uniform01)");
}

double CapacityDistribution::mean() const {
  switch (kind_) {
    case Kind::Bernoulli:
    case Kind::ScaledBernoulli:
      return a_ * p_;
    case Kind::FiniteDiscrete: {
      double m = 0.0;
      for (const Atom& a : atoms_) m += a.value * a.prob;
      return m;
    }
    case Kind::Uniform01:
      return 0.5;
  }
  return 0.0;
}

double CapacityDistribution::quantile(double u) const {
  switch (kind_) {
    case Kind::Bernoulli:
    case Kind::ScaledBernoulli:
      return u >= 1.0 - p_ ? a_ : 0.0;
    case Kind::FiniteDiscrete: {
      for (std::size_t i = 0; i + 1 < atoms_.size(); ++i)
        if (u < cumulative_[i]) return atoms_[i].value;
      return atoms_.back().value;
    }
    case Kind::Uniform01:
      return u;
  }
  return 0.0;
}

double CapacityDistribution::survival(double c) const {
  switch (kind_) {
    case Kind::Bernoulli:
    case Kind::ScaledBernoulli:
      if (c <= 0.0) return 1.0;
      return c <= a_ ? p_ : 0.0;
    case Kind::FiniteDiscrete: {
      double s = 0.0;
      for (const Atom& a : atoms_)
        if (a.value >= c) s += a.prob;
      return s;
    }
    case Kind::Uniform01:
      if (c <= 0.0) return 1.0;
      return c >= 1.0 ? 0.0 : 1.0 - c;
  }
  return 0.0;
}

std::vector<Atom> CapacityDistribution::atoms() const {
  switch (kind_) {
    case Kind::Bernoulli:
    case Kind::ScaledBernoulli:
      if (p_ == 1.0) return {Atom{a_, 1.0}};
      if (p_ == 0.0) return {Atom{0.0, 1.0}};
      return {Atom{0.0, 1.0 - p_}, Atom{a_, p_}};
    case Kind::FiniteDiscrete:
      return atoms_;
    case Kind::Uniform01:
      break;
  }
  throw std::logic_error("uniform01 has no atoms; discretize it first");
}

std::string CapacityDistribution::toString() const {
  switch (kind_) {
    case Kind::Bernoulli:
      return "bernoulli:" + formatReal(p_);
    case Kind::ScaledBernoulli:
      return "scaled:" + formatReal(a_) + ":" + formatReal(p_);
    case Kind::FiniteDiscrete: {
      std::string s = "finite:";
      for (std::size_t i = 0; i < atoms_.size(); ++i) {
        if (i) s += ",";
        s += formatReal(atoms_[i].value) + ":" + formatReal(atoms_[i].prob);
      }
      return s;
    }
    case Kind::Uniform01:
      return "uniform01";
  }
  return {};
}

CapacityNetwork sample(const CapacityDistribution& dist, const CubeTopology& topo,
                       std::uint64_t seed) {
  CapacityNetwork net;
  net.topo = topo;
  net.dist = dist;
  net.seed = seed;
  net.cap.resize(static_cast<Eigen::Index>(topo.edgeCount()));
  for (Eigen::Index e = 0; e < net.cap.size(); ++e)
    net.cap[e] = dist.quantile(counterUniform(seed, kCapacityStream, static_cast<std::uint64_t>(e)));
  return net;
}

CapacityNetwork networkFromCapacities(const CubeTopology& topo, Eigen::VectorXd cap,
                                      const CapacityDistribution& dist, std::uint64_t seed) {
  if (static_cast<std::size_t>(cap.size()) != topo.edgeCount())
    throw std::invalid_argument("capacity vector length must equal d 2^{d-1} = " +
                                std::to_string(topo.edgeCount()));
  for (Eigen::Index e = 0; e < cap.size(); ++e)
    if (!(cap[e] >= 0.0) || !std::isfinite(cap[e]))
      throw std::invalid_argument("capacities must be finite and nonnegative");
  CapacityNetwork net;
  net.topo = topo;
  net.cap = std::move(cap);
  net.dist = dist;
  net.seed = seed;
  return net;
}

Truncation truncateToBernoulli(const CapacityDistribution& dist) {
  if (!(dist.survival(std::nextafter(0.0, 1.0)) > 0.5))
    throw std::domain_error("condition violated: Pr[C > 0] must exceed 1/2");
  constexpr double kStep = 1.0 / 128.0;
  constexpr double kMargin = 1.0 / 1024.0;
  const double q = dist.quantile(0.99);
  std::vector<double> candidates;
  for (int j = 1; j * kStep <= q; ++j) candidates.push_back(j * kStep);
  if (dist.isFinite())
    for (const Atom& a : dist.atoms())
      if (a.value > 0.0 && a.value <= q) candidates.push_back(a.value);
  Truncation best;
  for (double c : candidates) {
    const double s = dist.survival(c);
    if (s > 0.5 + kMargin && c > best.cStar) best = Truncation{c, s};
  }
  if (best.cStar <= 0.0)
    throw std::domain_error("condition violated: no truncation level clears 1/2 + 2^-10");
  return best;
}

Eigen::VectorXd truncatedCapacities(const CapacityNetwork& net, const Truncation& t) {
  return (net.cap.array() >= t.cStar).cast<double>() * t.cStar;
}

CapacityDistribution discretize(const CapacityDistribution& dist, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("discretize needs eps > 0");
  if (dist.isFinite()) return dist;
  const int n = static_cast<int>(std::ceil(1.0 / eps - 1e-12));
  std::vector<Atom> atoms;
  double used = 0.0;
  for (int k = 0; k < n; ++k) {
    const double prob = (k + 1 == n) ? 1.0 - used : std::min(eps, 1.0 - k * eps);
    atoms.push_back(Atom{k * eps, prob});
    used += prob;
  }
  return CapacityDistribution::finiteDiscrete(std::move(atoms));
}

double discretizeValue(const CapacityDistribution& dist, double eps, double c) {
  if (dist.isFinite()) return c;
  const int n = static_cast<int>(std::ceil(1.0 / eps - 1e-12));
  int k = std::min(static_cast<int>(std::floor(c / eps)), n - 1);
  if (k * eps > c) --k;
  return std::max(k, 0) * eps;
}

Eigen::VectorXd discretizedCapacities(const CapacityNetwork& net, double eps) {
  if (net.dist.isFinite()) return net.cap;
  Eigen::VectorXd out(net.cap.size());
  for (Eigen::Index e = 0; e < out.size(); ++e) out[e] = discretizeValue(net.dist, eps, net.cap[e]);
  return out;
}

}  // namespace hcflow
