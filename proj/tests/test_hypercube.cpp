#include "doctest.h"

#include <algorithm>
#include <set>

#include "hcflow/hypercube.hpp"

using namespace hcflow;

TEST_CASE("neighbors flip one bit in ascending dimension order") {
  CHECK(neighbors(CubeTopology(3), 0b000) == std::vector<Vertex>{0b001, 0b010, 0b100});
  CHECK(neighbors(CubeTopology(1), 0) == std::vector<Vertex>{1});
  CHECK(neighbors(CubeTopology(4), 0b0101) == std::vector<Vertex>{0b0100, 0b0111, 0b0001, 0b1101});
  CHECK_THROWS_AS(neighbors(CubeTopology(3), 8), std::domain_error);
}

TEST_CASE("dimension cap is validated") {
  CHECK_THROWS_AS(CubeTopology(0), std::domain_error);
  CHECK_THROWS_AS(CubeTopology(kMaxDimension + 1), std::domain_error);
  CHECK(CubeTopology(kMaxDimension).edgeCount() == std::size_t{24} << 23);
}

TEST_CASE("edge indexing is a bijection onto canonical edges") {
  for (int d = 1; d <= 8; ++d) {
    CubeTopology topo(d);
    std::set<std::pair<Vertex, int>> seen;
    for (std::size_t i = 0; i < topo.edgeCount(); ++i) {
      const EdgeId e = topo.edgeAt(i);
      CHECK(((e.lower >> e.dim) & 1u) == 0u);
      CHECK(topo.edgeIndex(e) == i);
      CHECK(topo.edgeIndex(e.upper(), e.dim) == i);
      CHECK(topo.edgeBetween(e.upper(), e.lower) == e);
      seen.insert({e.lower, e.dim});
    }
    CHECK(seen.size() == topo.edgeCount());
  }
  CHECK_THROWS_AS(CubeTopology(3).edgeBetween(0, 3), std::domain_error);
}

TEST_CASE("layer sizes") {
  CHECK(layerSizes(CubeTopology(4), 2).vertices == 6);
  CHECK(layerSizes(CubeTopology(4), 2).edges == 12);
  CHECK(layerSizes(CubeTopology(3), 0).vertices == 1);
  CHECK(layerSizes(CubeTopology(16), 8).vertices == 12870);
  CHECK(layerSizes(CubeTopology(16), 8).edges == 102960);
  CHECK_THROWS_AS(layerSizes(CubeTopology(4), 5), std::domain_error);
  CHECK_THROWS_AS(layerSizes(CubeTopology(4), -1), std::domain_error);

  for (int d = 1; d <= 16; ++d) {
    std::uint64_t total = 0;
    for (int m = 1; m <= d; ++m) total += layerSizes(CubeTopology(d), m).edges;
    CHECK(total == static_cast<std::uint64_t>(d) << (d - 1));
  }
}

TEST_CASE("each edge lies in E_m(v) for exactly 2|E_m|/d sources v") {
  for (int d = 1; d <= 8; ++d) {
    CubeTopology topo(d);
    for (std::size_t i = 0; i < topo.edgeCount(); ++i) {
      const EdgeId e = topo.edgeAt(i);
      std::vector<std::uint64_t> count(static_cast<std::size_t>(d) + 1, 0);
      for (Vertex v = 0; v < topo.vertexCount(); ++v) {
        const int far = std::max(popcount(e.lower ^ v), popcount(e.upper() ^ v));
        ++count[static_cast<std::size_t>(far)];
      }
      for (int m = 1; m <= d; ++m)
        CHECK(count[static_cast<std::size_t>(m)] * static_cast<std::uint64_t>(d) == 2 * layerSizes(d, m).edges);
    }
  }
}

TEST_CASE("neighborhood matching") {
  using P = std::pair<Vertex, Vertex>;
  CHECK(neighborhoodMatching(CubeTopology(3), 0b000, 0b001) == std::vector<P>{{0b010, 0b011}, {0b100, 0b101}});
  CHECK(neighborhoodMatching(CubeTopology(2), 0b00, 0b01) == std::vector<P>{{0b10, 0b11}});
  const auto m4 = neighborhoodMatching(CubeTopology(4), 0b0000, 0b1000);
  REQUIRE(m4.size() == 3);
  for (const auto& [w1, w2] : m4) CHECK(w2 == (w1 | 0b1000));
  CHECK_THROWS_AS(neighborhoodMatching(CubeTopology(3), 0, 3), std::domain_error);

  for (int d = 2; d <= 8; ++d) {
    CubeTopology topo(d);
    for (Vertex u = 0; u < topo.vertexCount(); u += 7) {
      for (Vertex v : neighbors(topo, u)) {
        const auto pairs = neighborhoodMatching(topo, u, v);
        REQUIRE(pairs.size() == static_cast<std::size_t>(d - 1));
        std::set<Vertex> inner;
        for (const auto& [w1, w2] : pairs) {
          CHECK(popcount(u ^ w1) == 1);
          CHECK(popcount(w1 ^ w2) == 1);
          CHECK(popcount(w2 ^ v) == 1);
          CHECK(popcount(u ^ w2) == 2);
          CHECK(w1 != v);
          inner.insert(w1);
          inner.insert(w2);
        }
        CHECK(inner.size() == 2 * pairs.size());
      }
    }
  }
}

TEST_CASE("subcube spans exactly the sets between u and v") {
  CubeTopology t4(4);
  const SubcubeSpec s = subcube(t4, 0b0000, 0b0110);
  CHECK(s.k == 2);
  CHECK(s.vertices() == std::vector<Vertex>{0b0000, 0b0010, 0b0100, 0b0110});

  const SubcubeSpec whole = subcube(CubeTopology(3), 0b000, 0b111);
  CHECK(whole.k == 3);
  CHECK(whole.vertices().size() == 8);

  const SubcubeSpec s5 = subcube(CubeTopology(5), 0b00001, 0b11001);
  CHECK(s5.k == 2);
  CHECK(s5.fixedBits == 0b00001);
  CHECK_THROWS_AS(subcube(t4, 3, 3), std::domain_error);

  CubeTopology t6(6);
  for (Vertex u = 0; u < 64; u += 5)
    for (Vertex v = 0; v < 64; v += 3) {
      if (u == v) continue;
      const SubcubeSpec q = subcube(t6, u, v);
      std::size_t members = 0;
      for (Vertex x = 0; x < 64; ++x) {
        const bool between = (x & (u & v)) == (u & v) && (x & ~(u | v)) == 0u;
        // subcube in the coordinate sense: agrees with u on every coordinate where u and v agree
        const bool agrees = ((x ^ u) & ~(u ^ v)) == 0u;
        CHECK(q.contains(x) == agrees);
        if (u == 0) CHECK(agrees == between);
        members += agrees;
      }
      CHECK(members == (std::size_t{1} << q.k));
    }
}

TEST_CASE("boundary sets") {
  CubeTopology t4(4);
  CHECK(boundarySet(t4, 0b0000, 0b1110, 1) == std::vector<Vertex>{0b0010, 0b0100, 0b1000});
  CHECK(boundarySet(t4, 0b0101, 0b1110, 0) == std::vector<Vertex>{0b0101});
  CHECK(boundarySet(CubeTopology(6), 0, 0b111111, 2).size() == 15);
  CHECK_THROWS_AS(boundarySet(t4, 0, 0b0011, 3), std::domain_error);

  CubeTopology t7(7);
  for (Vertex u = 0; u < 128; u += 11)
    for (Vertex v = 1; v < 128; v += 13) {
      if (u == v) continue;
      const SubcubeSpec q = subcube(t7, u, v);
      for (int ell = 0; ell <= q.k; ++ell) {
        const auto b = boundarySet(t7, u, v, ell);
        CHECK(b.size() == binomial(q.k, ell));
        for (Vertex x : b) {
          CHECK(popcount(x ^ u) == ell);
          CHECK(q.contains(x));
        }
      }
    }
}

TEST_CASE("frames and layers") {
  CubeTopology topo(6);
  const Frame f = Frame::between(0b000011, 0b110110);
  CHECK(f.k == 4);
  for (int m = 0; m <= f.k; ++m) {
    const auto layer = layerVertices(f, m);
    CHECK(layer.size() == binomial(4, m));
    for (Vertex x : layer) {
      CHECK(f.contains(x));
      CHECK(f.layerOf(x) == m);
    }
  }
  CHECK(depositBits(0b101, 0b110010) == 0b100010);
}
