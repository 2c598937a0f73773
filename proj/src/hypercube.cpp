#include "hcflow/hypercube.hpp"

#include <string>

namespace hcflow {

std::uint64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / i;
  return r;
}

CubeTopology::CubeTopology(int d) : d_(d) {
  if (d < 1 || d > kMaxDimension)
    throw std::domain_error("dimension must lie in [1, " + std::to_string(kMaxDimension) +
                            "], got " + std::to_string(d));
}

EdgeId CubeTopology::edgeAt(std::size_t index) const {
  if (index >= edgeCount()) throw std::domain_error("edge index out of range");
  const int dim = static_cast<int>(index >> (d_ - 1));
  const Vertex packed = static_cast<Vertex>(index & ((std::size_t{1} << (d_ - 1)) - 1));
  const Vertex low = packed & ((Vertex{1} << dim) - 1);
  const Vertex high = (packed >> dim) << (dim + 1);
  return EdgeId{high | low, dim};
}

EdgeId CubeTopology::edgeBetween(Vertex x, Vertex y) const {
  requireVertex(x);
  requireVertex(y);
  const Vertex diff = x ^ y;
  if (popcount(diff) != 1) throw std::domain_error("vertices are not adjacent");
  const int dim = std::countr_zero(diff);
  return EdgeId{x & ~diff, dim};
}

std::vector<Vertex> neighbors(const CubeTopology& topo, Vertex x) {
  topo.requireVertex(x);
  std::vector<Vertex> out;
  out.reserve(topo.dim());
  for (int i = 0; i < topo.dim(); ++i) out.push_back(x ^ (Vertex{1} << i));
  return out;
}

LayerSize layerSizes(int k, int m) {
  if (m < 0 || m > k) throw std::domain_error("layer index out of range");
  const std::uint64_t v = binomial(k, m);
  return LayerSize{v, static_cast<std::uint64_t>(m) * v};
}

LayerSize layerSizes(const CubeTopology& topo, int m) { return layerSizes(topo.dim(), m); }

std::vector<std::pair<Vertex, Vertex>> neighborhoodMatching(const CubeTopology& topo, Vertex u,
                                                            Vertex v) {
  topo.requireVertex(u);
  topo.requireVertex(v);
  if (popcount(u ^ v) != 1) throw std::domain_error("neighborhoodMatching needs adjacent u, v");
  const Vertex iBit = u ^ v;
  std::vector<std::pair<Vertex, Vertex>> out;
  out.reserve(topo.dim() - 1);
  for (int j = 0; j < topo.dim(); ++j) {
    const Vertex jBit = Vertex{1} << j;
    if (jBit == iBit) continue;
    out.emplace_back(u ^ jBit, u ^ jBit ^ iBit);
  }
  return out;
}

std::vector<Vertex> SubcubeSpec::vertices() const {
  std::vector<Vertex> out;
  out.reserve(std::size_t{1} << k);
  for (std::uint32_t s = 0; s < (std::uint32_t{1} << k); ++s)
    out.push_back(fixedBits | depositBits(s, freeBits));
  return out;
}

SubcubeSpec subcube(const CubeTopology& topo, Vertex u, Vertex v) {
  topo.requireVertex(u);
  topo.requireVertex(v);
  if (u == v) throw std::domain_error("subcube needs distinct vertices");
  return SubcubeSpec{u, v, popcount(u ^ v), u & v, u ^ v};
}

std::vector<Vertex> boundarySet(const CubeTopology& topo, Vertex u, Vertex v, int ell) {
  topo.requireVertex(u);
  topo.requireVertex(v);
  const Frame frame = Frame::between(u, v);
  if (ell < 0 || ell > frame.k) throw std::domain_error("ell out of range for boundarySet");
  return layerVertices(frame, ell);
}

Vertex depositBits(std::uint32_t bits, Vertex mask) {
  Vertex out = 0;
  for (Vertex m = mask; m != 0 && bits != 0; m &= m - 1, bits >>= 1)
    if (bits & 1u) out |= m & (~m + 1);
  return out;
}

std::vector<Vertex> layerVertices(const Frame& frame, int m) {
  if (m < 0 || m > frame.k) throw std::domain_error("layer index out of range");
  std::vector<Vertex> out;
  out.reserve(binomial(frame.k, m));
  if (m == 0) {
    out.push_back(frame.origin);
    return out;
  }
  // Gosper's hack over k-bit patterns with m ones
  std::uint64_t s = (std::uint64_t{1} << m) - 1;
  const std::uint64_t limit = std::uint64_t{1} << frame.k;
  while (s < limit) {
    out.push_back(frame.origin ^ depositBits(static_cast<std::uint32_t>(s), frame.freeMask));
    const std::uint64_t c = s & (~s + 1);
    const std::uint64_t r = s + c;
    s = (((r ^ s) >> 2) / c) | r;
  }
  return out;
}

}  // namespace hcflow
