#include <gtest/gtest.h>

#include <random>

#include "meshvor/kinetic.hpp"
#include "meshvor/mesher.hpp"
#include "meshvor/oracle.hpp"

namespace meshvor {
namespace {

constexpr auto I = WeightClass::Input;
constexpr auto S = WeightClass::Steiner;

// a = (0,0) I, b = (2,0) I, q1 = (1,1/2) S, q2 = (1,-1) S.
Triangulation handcrafted_quad() {
  const std::array<Point, 4> c{{{0, 0}, {1, -1}, {2, 0}, {1, 0.5}}};
  return Triangulation::init_box(c, {I, S, I, S});
}

VertexId id_at(const Triangulation& t, Point p) {
  for (const VertexId v : t.live_vertices()) {
    if (t.point(v) == p) return v;
  }
  throw std::logic_error("no such vertex");
}

bool has_edge(const Triangulation& t, Point p, Point q) {
  return t.find_edge(id_at(t, p), id_at(t, q)).has_value();
}

std::vector<Point> random_points(std::uint64_t seed, int n) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point> p;
  for (int i = 0; i < n; ++i) p.push_back({u(rng), u(rng)});
  return p;
}

TEST(Certificate, HandcraftedQuad) {
  KineticState k(handcrafted_quad());
  ASSERT_TRUE(has_edge(k.triangulation(), {1, 0.5}, {1, -1}));
  const EdgeRef e = k.triangulation().interior_edge_refs().front();
  const auto ev = k.certificate(e);
  ASSERT_TRUE(ev.has_value());
  EXPECT_EQ(ev->time, mpq_class(1, 2));
  EXPECT_EQ(k.stats().potential_flips_seen, 1u);
}

TEST(Certificate, AllInputQuadAndPastRoot) {
  const std::array<Point, 4> sq{{{0, 0}, {3, 0}, {3, 2}, {0, 2}}};
  KineticState all(Triangulation::init_box(sq, {I, I, I, I}));
  EXPECT_FALSE(all.certificate(all.triangulation().interior_edge_refs().front()).has_value());

  // (0,0) I, (1,0) I, (1/2,1) I, (1/2,-1) S: the root is -3/2.
  const std::array<Point, 4> kite{{{0, 0}, {0.5, -1}, {1, 0}, {0.5, 1}}};
  KineticState past(Triangulation::init_box(kite, {I, S, I, I}));
  EXPECT_FALSE(past.certificate(past.triangulation().interior_edge_refs().front()).has_value());
  EXPECT_EQ(past.stats().late_certificates, 0u);

  KineticState hull(handcrafted_quad());
  const TriangleRef r = hull.triangulation().live_triangles().front();
  for (int i = 0; i < 3; ++i) {
    if (!hull.triangulation().is_interior({r, i})) EXPECT_THROW(hull.certificate({r, i}), PreconditionError);
  }
}

TEST(Seed, BoxHasNoEvents) {
  KineticState k(Triangulation::init_box(std::array<Point, 4>{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}}));
  k.seed();
  EXPECT_TRUE(k.heap().empty());
  EXPECT_EQ(k.stats().potential_flips_seen, 1u);
  EXPECT_THROW(k.seed(), PreconditionError);
}

TEST(Seed, HandcraftedQuadAndSinglePointMesh) {
  KineticState q(handcrafted_quad());
  q.seed();
  ASSERT_EQ(q.heap().size(), 1u);
  EXPECT_EQ(q.heap().top().time, mpq_class(1, 2));

  const std::vector<Point> one{{0.25, 0.5}};
  KineticState m(refine(one).triangulation);
  m.seed();
  EXPECT_EQ(m.stats().potential_flips_seen, m.triangulation().interior_edges().size());
  EXPECT_EQ(m.heap().size(), m.stats().events_scheduled);
}

TEST(Step, HandcraftedQuadFlips) {
  KineticState k(handcrafted_quad());
  k.seed();
  EXPECT_EQ(k.step(), StepOutcome::PerformedFlip22);
  EXPECT_EQ(k.now(), mpq_class(1, 2));
  EXPECT_TRUE(has_edge(k.triangulation(), {0, 0}, {2, 0}));
  EXPECT_FALSE(has_edge(k.triangulation(), {1, 0.5}, {1, -1}));
  StepOutcome s;
  while ((s = k.step()) == StepOutcome::Stale) {
  }
  EXPECT_EQ(s, StepOutcome::Exhausted);
  EXPECT_FALSE(k.triangulation().validate().has_value());
}

TEST(Step, RestampedCertificateIsStale) {
  KineticState k(handcrafted_quad());
  k.seed();
  Triangulation& t = k.triangulation_for_testing();
  const EdgeRef e = t.interior_edge_refs().front();
  t.flip22(t.flip22(e));  // same simplices, new stamps
  EXPECT_EQ(k.step(), StepOutcome::Stale);
  EXPECT_EQ(k.stats().stale_pops, 1u);
  EXPECT_EQ(k.stats().flips(), 0u);
}

TEST(Step, SteinerInsideInputTriangleIsRemovedAtItsRoot) {
  Triangulation t = Triangulation::init_box(std::array<Point, 4>{{{-8, -8}, {8, -8}, {8, 8}, {-8, 8}}});
  t.insert_vertex({0, 0}, I);
  t.insert_vertex({1, 0}, I);
  t.insert_vertex({0, 1}, I);
  const VertexId s = t.insert_vertex({0.1, 0.1}, S);
  ASSERT_EQ(t.vertex_degree(s), 3u);
  const EventTime expect = flip_time({{{{0, 0}, I}, {{1, 0}, I}, {{0, 1}, I}, {{0.1, 0.1}, S}}});
  ASSERT_TRUE(expect.has_time());

  KineticState k(std::move(t));
  std::optional<ExactScalar> removed_at;
  k.set_trace([&](const TraceRecord& r) {
    if (r.kind == StepOutcome::PerformedFlip31 && r.vertices[0] == index_of(s)) removed_at = r.time;
  });
  k.seed();
  k.run();
  ASSERT_TRUE(removed_at.has_value());
  EXPECT_EQ(*removed_at, expect.time);
  EXPECT_TRUE(k.triangulation().vertex(s).removed);
  EXPECT_GE(k.stats().flips_31, 1u);
}

TEST(Step, SteinerOnInputDiagonalIsRemovedInOneStep) {
  // Center of an Input square: the lifted center reaches the corners' plane
  // when 8 = 16 - t.
  Triangulation t = Triangulation::init_box(std::array<Point, 4>{{{0, 0}, {4, 0}, {4, 4}, {0, 4}}}, {I, I, I, I});
  const VertexId s = t.insert_vertex({2, 2}, S);
  KineticState k(std::move(t));
  std::vector<TraceRecord> trace;
  k.set_trace([&](const TraceRecord& r) { trace.push_back(r); });
  k.seed();
  k.run();
  EXPECT_TRUE(k.triangulation().vertex(s).removed);
  ASSERT_EQ(trace.size(), 2u);
  EXPECT_EQ(trace[1].kind, StepOutcome::PerformedFlip31);
  EXPECT_EQ(trace[1].vertices[0], index_of(s));
  EXPECT_EQ(trace[1].time, 8);
  EXPECT_EQ(k.stats().degenerate_pops, 0u);
  EXPECT_FALSE(k.triangulation().validate().has_value());
}

TEST(Run, HandcraftedQuadEndToEnd) {
  KineticState k(handcrafted_quad());
  k.seed();
  const RunStats st = k.run();
  EXPECT_EQ(st.flips(), 1u);
  const Triangulation& t = k.triangulation();
  EXPECT_TRUE(t.is_hull_vertex(id_at(t, {1, 0.5})));
  EXPECT_TRUE(t.is_hull_vertex(id_at(t, {1, -1})));
  const SimplexSet out = k.postprocess();
  EXPECT_EQ(out.vertices, (std::vector<std::uint32_t>{0, 1}));
  EXPECT_EQ(out.edges.size(), 1u);
  EXPECT_TRUE(out.triangles.empty());
  // 4 vertices + 5 edges + 2 triangles, minus the 3 kept.
  EXPECT_EQ(k.stats().scaffolding_count, 8u);
}

TEST(Run, AllInputInstanceHasNoFlips) {
  Triangulation t = Triangulation::init_box(std::array<Point, 4>{{{0, 0}, {4, 0}, {4, 4}, {0, 4}}}, {I, I, I, I});
  for (const Point p : random_points(5, 20)) t.insert_vertex({1 + 2 * p.x, 1 + 2 * p.y}, I);
  KineticState k(std::move(t));
  k.seed();
  EXPECT_EQ(k.run().flips(), 0u);
  EXPECT_EQ(k.stats().events_scheduled, 0u);
}

TEST(Run, MeshedRandomInstancesMatchOracle) {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto p = random_points(seed, 25);
    KineticState k(refine(p).triangulation);
    k.seed();
    k.run();
    EXPECT_FALSE(k.interior_scaffolding_vertex().has_value());
    EXPECT_FALSE(k.triangulation().validate().has_value());
    EXPECT_EQ(k.stats().late_certificates, 0u);
    EXPECT_EQ(k.stats().degenerate_pops, 0u);
    EXPECT_TRUE(diff(k.postprocess(), brute_delaunay(p)).empty()) << "seed " << seed;
  }
}

TEST(Run, ThreeInputPoints) {
  const std::vector<Point> p{{0, 0}, {1, 0.25}, {0.375, 1}};
  KineticState k(refine(p).triangulation);
  k.seed();
  k.run();
  const SimplexSet s = k.postprocess();
  EXPECT_EQ(s.triangles.size(), 1u);
  EXPECT_EQ(face_count(s), 7u);
}

TEST(Run, ComplexMatchesWeightedOracleBetweenEvents) {
  const auto p = random_points(77, 8);
  const MeshResult mesh = refine(p);
  ASSERT_LE(mesh.triangulation.live_vertex_count(), 60u);
  std::vector<Site> sites;
  for (const VertexId v : mesh.triangulation.live_vertices()) sites.push_back(mesh.triangulation.site(v));
  KineticState k(mesh.triangulation);
  int checked = 0;
  k.set_interval_hook([&](const KineticState& st, const ExactScalar& lo, const ExactScalar& hi) {
    const ExactScalar mid = (lo + hi) / 2;
    const SimplexDiff d = diff(st.triangulation().simplices(), brute_weighted_delaunay(sites, mid));
    EXPECT_TRUE(d.empty()) << "t = " << to_exact_string(mid) << "\n" << d.describe();
    ++checked;
  });
  k.seed();
  k.run();
  EXPECT_GT(checked, 3);
  const ExactScalar after = k.now() + 1;
  EXPECT_TRUE(diff(k.triangulation().simplices(), brute_weighted_delaunay(sites, after)).empty());
}

TEST(Run, DeterministicTrace) {
  const auto p = random_points(4, 30);
  auto trace = [&] {
    std::vector<std::string> out;
    KineticState k(refine(p).triangulation);
    k.set_trace([&](const TraceRecord& r) {
      out.push_back(to_exact_string(r.time) + to_string(r.kind) + std::to_string(r.vertices[0]) +
                    std::to_string(r.vertices[1]));
    });
    k.seed();
    k.run();
    return std::pair{out, k.stats()};
  };
  const auto a = trace();
  const auto b = trace();
  EXPECT_EQ(a.first, b.first);
  EXPECT_EQ(a.second, b.second);
  EXPECT_FALSE(a.first.empty());
}

}  // namespace
}  // namespace meshvor
