#include <gtest/gtest.h>

#include <random>
#include <set>

#include "meshvor/complex.hpp"
#include "meshvor/oracle.hpp"

namespace meshvor {
namespace {

constexpr std::array<Point, 4> kUnitSquare{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};

Triangulation unit_box() { return Triangulation::init_box(kUnitSquare); }

void expect_valid(const Triangulation& t) {
  const auto v = t.validate();
  EXPECT_FALSE(v.has_value()) << to_string(v->kind) << ": " << v->where;
}

TEST(InitBox, UnitSquare) {
  const Triangulation t = unit_box();
  EXPECT_EQ(t.live_vertex_count(), 4u);
  EXPECT_EQ(t.live_triangle_count(), 2u);
  EXPECT_EQ(t.interior_edges().size(), 1u);
  expect_valid(t);
  for (std::uint32_t i = 0; i < 4; ++i) {
    EXPECT_TRUE(t.is_hull_vertex(VertexId{i}));
    EXPECT_EQ(t.vertex(VertexId{i}).kind, WeightClass::Box);
  }
}

TEST(InitBox, AcceptsClockwiseCorners) {
  const std::array<Point, 4> cw{{{0, 0}, {0, 1}, {1, 1}, {1, 0}}};
  expect_valid(Triangulation::init_box(cw));
}

TEST(InitBox, RejectsDegenerateCorners) {
  const std::array<Point, 4> line{{{0, 0}, {1, 0}, {2, 0}, {3, 0}}};
  EXPECT_THROW(Triangulation::init_box(line), DegenerateError);
  const std::array<Point, 4> dart{{{0, 0}, {2, 0}, {0.5, 0.5}, {0, 2}}};
  EXPECT_THROW(Triangulation::init_box(dart), DegenerateError);
}

TEST(Locate, Classification) {
  const Triangulation t = unit_box();
  const Location center = t.locate({0.5, 0.5});
  EXPECT_EQ(center.kind, Containment::OnEdge);  // on the diagonal
  const Location inner = t.locate({0.25, 0.6});
  EXPECT_EQ(inner.kind, Containment::Interior);
  const Location corner = t.locate({1, 1});
  EXPECT_EQ(corner.kind, Containment::OnVertex);
  EXPECT_EQ(t.triangle(corner.tri).v[corner.index], VertexId{2});
  EXPECT_THROW(t.locate({2, 2}), PreconditionError);
}

TEST(InsertVertex, CenterOfBox) {
  Triangulation t = unit_box();
  const VertexId c = t.insert_vertex({0.5, 0.5}, WeightClass::Input);
  EXPECT_EQ(t.live_triangle_count(), 4u);
  EXPECT_EQ(t.vertex_degree(c), 4u);
  EXPECT_FALSE(t.is_hull_vertex(c));
  EXPECT_EQ(t.interior_edges().size(), 4u);
  expect_valid(t);
}

TEST(InsertVertex, DuplicateAndOutside) {
  Triangulation t = unit_box();
  t.insert_vertex({0.3, 0.4}, WeightClass::Input);
  EXPECT_THROW(t.insert_vertex({0.3, 0.4}, WeightClass::Input), DuplicatePointError);
  EXPECT_THROW(t.insert_vertex({1.5, 0.4}, WeightClass::Input), PreconditionError);
}

TEST(InsertVertex, OnHullEdge) {
  Triangulation t = unit_box();
  const VertexId m = t.insert_vertex({0.5, 0}, WeightClass::Steiner);
  EXPECT_TRUE(t.is_hull_vertex(m));
  EXPECT_EQ(t.live_triangle_count(), 3u);
  expect_valid(t);
}

TEST(InsertVertex, CocircularChoiceIsReproducible) {
  // Box corners and a fourth point on the same circle as three others.
  auto build = [] {
    Triangulation t = Triangulation::init_box(std::array<Point, 4>{{{-4, -4}, {4, -4}, {4, 4}, {-4, 4}}});
    t.insert_vertex({0, 0}, WeightClass::Input);
    t.insert_vertex({1, 0}, WeightClass::Input);
    t.insert_vertex({1, 1}, WeightClass::Input);
    t.insert_vertex({0, 1}, WeightClass::Input);
    return t;
  };
  const SimplexSet a = build().simplices();
  const SimplexSet b = build().simplices();
  EXPECT_EQ(a, b);
  // Exactly one of the square's diagonals is present.
  const bool d02 = std::binary_search(a.edges.begin(), a.edges.end(), SimplexSet::make_edge(4, 6));
  const bool d13 = std::binary_search(a.edges.begin(), a.edges.end(), SimplexSet::make_edge(5, 7));
  EXPECT_NE(d02, d13);
  expect_valid(build());
}

TEST(InsertVertex, MatchesBruteForceDelaunay) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int trial = 0; trial < 5; ++trial) {
    Triangulation t = unit_box();
    std::vector<Point> all(kUnitSquare.begin(), kUnitSquare.end());
    for (int i = 0; i < 50; ++i) {
      const Point p{u(rng), u(rng)};
      t.insert_vertex(p, WeightClass::Input);
      all.push_back(p);
      ASSERT_FALSE(t.validate().has_value());
    }
    EXPECT_EQ(t.simplices(), brute_delaunay(all));
  }
}

TEST(InsertVertex, GridWithManyCocircularQuads) {
  Triangulation t = Triangulation::init_box(std::array<Point, 4>{{{-1, -1}, {6, -1}, {6, 6}, {-1, 6}}});
  std::vector<Point> all{{-1, -1}, {6, -1}, {6, 6}, {-1, 6}};
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      t.insert_vertex({double(i), double(j)}, WeightClass::Input);
      all.push_back({double(i), double(j)});
    }
  }
  expect_valid(t);
  EXPECT_EQ(t.simplices(), brute_delaunay(all));
}

TEST(Flip22, SwapAndRestore) {
  Triangulation t = unit_box();
  const auto before = t.simplices();
  const EdgeRef e = t.interior_edge_refs().front();
  const EdgeKey old_key = t.edge_key(e);
  const auto tri0 = t.triangle(e.tri);
  const std::uint64_t stamp0 = tri0.stamp;
  const EdgeRef flipped = t.flip22(e);
  const EdgeKey new_key = t.edge_key(flipped);
  EXPECT_NE(old_key, new_key);
  EXPECT_GT(t.triangle(e.tri).stamp, stamp0);
  EXPECT_EQ(t.live_triangle_count(), 2u);
  expect_valid(t);
  t.flip22(flipped);
  EXPECT_EQ(t.simplices(), before);
  expect_valid(t);
}

TEST(Flip22, SquareDiagonal) {
  Triangulation t = unit_box();
  const EdgeRef e = t.interior_edge_refs().front();
  const EdgeKey k = t.edge_key(e);
  const EdgeKey k2 = t.edge_key(t.flip22(e));
  // One diagonal is {0,2} = (0,0)-(1,1), the other {1,3} = (1,0)-(0,1).
  const std::set<std::pair<std::uint32_t, std::uint32_t>> both{{index_of(k.lo), index_of(k.hi)},
                                                               {index_of(k2.lo), index_of(k2.hi)}};
  EXPECT_EQ(both, (std::set<std::pair<std::uint32_t, std::uint32_t>>{{0, 2}, {1, 3}}));
}

TEST(Flip22, RejectsHullEdgeAndNonConvexQuad) {
  Triangulation t = unit_box();
  const TriangleRef r = t.live_triangles().front();
  for (int k = 0; k < 3; ++k) {
    if (!t.is_interior({r, k})) EXPECT_THROW(t.flip22({r, k}), PreconditionError);
  }
  Triangulation dart = unit_box();
  const VertexId v = dart.insert_vertex({0.2, 0.3}, WeightClass::Steiner);
  // Some edge from v to a box corner has a reflex quad around it.
  int rejected = 0;
  for (const EdgeRef e : dart.interior_edge_refs()) {
    const auto [a, b] = dart.edge_vertices(e);
    if (a != v && b != v) continue;
    Triangulation copy = dart;
    try {
      copy.flip22(e);
    } catch (const PreconditionError&) {
      ++rejected;
    }
  }
  EXPECT_GT(rejected, 0);
}

TEST(Flip31, RemovesDegreeThreeVertex) {
  Triangulation t = Triangulation::init_box(std::array<Point, 4>{{{0, 0}, {4, 0}, {4, 4}, {0, 4}}});
  // Center of the box has degree 4 after insertion.
  const VertexId c = t.insert_vertex({2, 2}, WeightClass::Steiner);
  EXPECT_EQ(t.vertex_degree(c), 4u);
  EXPECT_THROW(t.flip31(c), PreconditionError);
  // Near the centroid of the bottom triangle no flip is triggered.
  const VertexId v = t.insert_vertex({2, 0.625}, WeightClass::Steiner);
  ASSERT_EQ(t.vertex_degree(v), 3u);
  const std::size_t before = t.live_triangle_count();
  t.flip31(v);
  EXPECT_TRUE(t.vertex(v).removed);
  EXPECT_EQ(t.live_triangle_count(), before - 2);
  expect_valid(t);
  EXPECT_THROW(t.flip31(VertexId{0}), PreconditionError);
}

TEST(Flip42, RemovesVertexOnADiagonal) {
  Triangulation t = Triangulation::init_box(std::array<Point, 4>{{{0, 0}, {4, 0}, {4, 4}, {0, 4}}});
  const VertexId c = t.insert_vertex({2, 2}, WeightClass::Steiner);
  ASSERT_EQ(t.vertex_degree(c), 4u);
  int done = 0;
  for (const EdgeRef e : t.interior_edge_refs()) {
    if (done) break;
    try {
      const auto out = t.flip42(e);
      ++done;
      EXPECT_NE(out[0], out[1]);
    } catch (const PreconditionError&) {
      // apexes not collinear with the center
    }
  }
  ASSERT_EQ(done, 1);
  EXPECT_TRUE(t.vertex(c).removed);
  EXPECT_EQ(t.live_triangle_count(), 2u);
  expect_valid(t);

  Triangulation u = Triangulation::init_box(std::array<Point, 4>{{{0, 0}, {4, 0}, {4, 4}, {0, 4}}});
  u.insert_vertex({2, 0.625}, WeightClass::Steiner);
  for (const EdgeRef e : u.interior_edge_refs()) EXPECT_THROW(u.flip42(e), PreconditionError);
}

TEST(Validate, DetectsCorruptedNeighborLink) {
  Triangulation t = unit_box();
  t.insert_vertex({0.3, 0.6}, WeightClass::Input);
  const TriangleRef r = t.live_triangles().front();
  Triangle& tri = t.triangle_for_testing(r);
  for (int k = 0; k < 3; ++k) {
    if (tri.nbr[k] != kNoTriangle) {
      tri.nbr[k] = r;
      break;
    }
  }
  const auto v = t.validate();
  ASSERT_TRUE(v.has_value());
  EXPECT_EQ(v->kind, ViolationKind::NeighborSymmetry);
}

TEST(Stamps, StrictlyIncreaseOnEveryChange) {
  Triangulation t = unit_box();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  std::vector<std::uint64_t> last(64, 0);
  for (int i = 0; i < 40; ++i) {
    t.insert_vertex({u(rng), u(rng)}, WeightClass::Steiner);
    for (std::uint32_t s = 0; s < t.triangle_slots(); ++s) {
      const std::uint64_t st = t.triangle(TriangleRef{s}).stamp;
      if (s >= last.size()) last.resize(s + 1, 0);
      ASSERT_GE(st, last[s]);
      last[s] = st;
    }
  }
}

}  // namespace
}  // namespace meshvor
