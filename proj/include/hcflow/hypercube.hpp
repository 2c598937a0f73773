#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace hcflow {

using Vertex = std::uint32_t;

inline constexpr int kMaxDimension = 24;

inline int popcount(Vertex x) { return std::popcount(x); }

// Exact binomial coefficient; fits for n <= 62.
std::uint64_t binomial(int n, int k);

struct EdgeId {
  Vertex lower = 0;
  int dim = 0;

  Vertex upper() const { return lower | (Vertex{1} << dim); }
  friend bool operator==(const EdgeId&, const EdgeId&) = default;
};

class CubeTopology {
 public:
  explicit CubeTopology(int d);

  int dim() const { return d_; }
  std::size_t vertexCount() const { return std::size_t{1} << d_; }
  std::size_t edgeCount() const { return static_cast<std::size_t>(d_) << (d_ - 1); }
  Vertex fullMask() const { return static_cast<Vertex>(vertexCount() - 1); }
  bool contains(Vertex x) const { return x < vertexCount(); }
  Vertex antipode(Vertex x) const { return x ^ fullMask(); }

  // index = dim * 2^{d-1} + lower with bit `dim` squeezed out
  std::size_t edgeIndex(EdgeId e) const {
    const Vertex low = e.lower & ((Vertex{1} << e.dim) - 1);
    const Vertex high = (e.lower >> (e.dim + 1)) << e.dim;
    return (static_cast<std::size_t>(e.dim) << (d_ - 1)) | (high | low);
  }
  // edge between x and x ^ (1 << dim), either endpoint
  std::size_t edgeIndex(Vertex x, int dim) const {
    return edgeIndex(EdgeId{x & ~(Vertex{1} << dim), dim});
  }
  EdgeId edgeAt(std::size_t index) const;
  EdgeId edgeBetween(Vertex x, Vertex y) const;

  void requireVertex(Vertex x) const {
    if (!contains(x)) throw std::domain_error("vertex out of range for dimension");
  }

  friend bool operator==(const CubeTopology&, const CubeTopology&) = default;

 private:
  int d_;
};

std::vector<Vertex> neighbors(const CubeTopology& topo, Vertex x);

struct LayerSize {
  std::uint64_t vertices = 0;
  std::uint64_t edges = 0;  // 0 for m = 0
};

LayerSize layerSizes(const CubeTopology& topo, int m);
LayerSize layerSizes(int k, int m);

// The d-1 pairs (w1, w2) giving 3-paths u-w1-w2-v, ascending in the flipped coordinate.
std::vector<std::pair<Vertex, Vertex>> neighborhoodMatching(const CubeTopology& topo, Vertex u,
                                                            Vertex v);

struct SubcubeSpec {
  Vertex u = 0;
  Vertex v = 0;
  int k = 0;
  Vertex fixedBits = 0;
  Vertex freeBits = 0;

  bool contains(Vertex x) const { return (x & ~freeBits) == fixedBits; }
  std::vector<Vertex> vertices() const;
};

SubcubeSpec subcube(const CubeTopology& topo, Vertex u, Vertex v);

std::vector<Vertex> boundarySet(const CubeTopology& topo, Vertex u, Vertex v, int ell);

// Scatter the low bits of `bits` into the set positions of `mask`.
Vertex depositBits(std::uint32_t bits, Vertex mask);

// A source vertex with the coordinates it may flip. Layers count flipped free coordinates.
struct Frame {
  Vertex origin = 0;
  Vertex freeMask = 0;
  int k = 0;

  static Frame whole(const CubeTopology& topo, Vertex u) {
    return Frame{u, topo.fullMask(), topo.dim()};
  }
  static Frame between(Vertex u, Vertex v) { return Frame{u, u ^ v, popcount(u ^ v)}; }

  bool contains(Vertex x) const { return ((x ^ origin) & ~freeMask) == 0; }
  int layerOf(Vertex x) const { return popcount((x ^ origin) & freeMask); }
  bool isFreeDim(int dim) const { return (freeMask >> dim) & 1u; }
  // edge-layer of the edge (x, x^bit) inside the frame
  int edgeLayer(Vertex x, int dim) const {
    return popcount((x ^ origin) & freeMask & ~(Vertex{1} << dim)) + 1;
  }
};

// Vertices of the frame at layer m, in ascending order of their free-coordinate pattern.
std::vector<Vertex> layerVertices(const Frame& frame, int m);

}  // namespace hcflow
