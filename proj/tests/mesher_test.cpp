#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "meshvor/mesher.hpp"

namespace meshvor {
namespace {

std::vector<Point> random_points(std::uint64_t seed, int n) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point> p;
  for (int i = 0; i < n; ++i) p.push_back({u(rng), u(rng)});
  return p;
}

void expect_well_spaced(const MeshResult& m, std::span<const Point> input, double tau) {
  const Triangulation& t = m.triangulation;
  EXPECT_FALSE(t.validate().has_value());
  EXPECT_FALSE(find_badly_spaced(t, tau).has_value());
  for (std::size_t i = 0; i < input.size(); ++i) {
    const VertexId v{static_cast<std::uint32_t>(4 + i)};
    EXPECT_EQ(t.point(v), input[i]);
    EXPECT_EQ(t.vertex(v).kind, WeightClass::Input);
    EXPECT_FALSE(t.is_hull_vertex(v));
  }
  for (const VertexId v : t.live_vertices()) {
    const Point p = t.point(v);
    EXPECT_GE(p.x, m.box[0].x);
    EXPECT_LE(p.x, m.box[2].x);
    EXPECT_GE(p.y, m.box[0].y);
    EXPECT_LE(p.y, m.box[2].y);
  }
  for (const AspectEntry& a : m.aspect_report) EXPECT_LE(a.aspect, tau * (1 + 1e-12));
}

TEST(BoundingBox, TwoPoints) {
  const std::vector<Point> p{{0, 0}, {1, 0}};
  const auto b = bounding_box(p, 3);
  EXPECT_EQ(b[0], (Point{-1, -1.5}));
  EXPECT_EQ(b[1], (Point{2, -1.5}));
  EXPECT_EQ(b[2], (Point{2, 1.5}));
  EXPECT_EQ(b[3], (Point{-1, 1.5}));
}

TEST(BoundingBox, SinglePointFallsBackToUnitExtent) {
  const std::vector<Point> p{{5, 5}};
  const auto b = bounding_box(p, 3);
  EXPECT_EQ(b[0], (Point{3.5, 3.5}));
  EXPECT_EQ(b[2], (Point{6.5, 6.5}));
}

TEST(BoundingBox, VerticalSegmentGivesSquare) {
  const std::vector<Point> p{{2, 0}, {2, 4}, {2, 1}};
  const auto b = bounding_box(p, 3);
  EXPECT_EQ(b[2].x - b[0].x, 12);
  EXPECT_EQ(b[2].y - b[0].y, 12);
  EXPECT_THROW(bounding_box(std::span<const Point>{}, 3), PreconditionError);
}

TEST(Aspect, CenterOfSquare) {
  Triangulation t = Triangulation::init_box(std::array<Point, 4>{{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}});
  const VertexId c = t.insert_vertex({0, 0}, WeightClass::Input);
  EXPECT_NEAR(aspect(t, c), std::numbers::sqrt2, 1e-15);
  EXPECT_FALSE(aspect_exceeds(t, c, 1.5));
  EXPECT_TRUE(aspect_exceeds(t, c, 1.4));
  EXPECT_THROW(aspect(t, VertexId{0}), PreconditionError);
}

TEST(Aspect, EquilateralSurround) {
  Triangulation t = Triangulation::init_box(std::array<Point, 4>{{{-10, -10}, {10, -10}, {10, 10}, {-10, 10}}});
  const VertexId c = t.insert_vertex({0, 0}, WeightClass::Input);
  for (int k = 0; k < 6; ++k) {
    const double a = k * std::numbers::pi / 3;
    t.insert_vertex({std::cos(a), std::sin(a)}, WeightClass::Input);
  }
  ASSERT_EQ(t.vertex_degree(c), 6u);
  EXPECT_NEAR(aspect(t, c), 2 / std::sqrt(3.0), 1e-12);
}

TEST(Refine, SinglePoint) {
  const std::vector<Point> p{{0, 0}};
  const MeshResult m = refine(p);
  // The box center already has aspect sqrt(2).
  EXPECT_EQ(m.steiner_count, 0u);
  expect_well_spaced(m, p, 3);
}

TEST(Refine, RandomPointsWellSpaced) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto p = random_points(seed, 60);
    const MeshResult m = refine(p);
    expect_well_spaced(m, p, 3);
  }
}

TEST(Refine, OtherTau) {
  const auto p = random_points(9, 40);
  MesherConfig cfg;
  cfg.tau = 2.5;
  expect_well_spaced(refine(p, cfg), p, 2.5);
  cfg.tau = 6;
  expect_well_spaced(refine(p, cfg), p, 6);
}

TEST(Refine, SteinerCountGrowsWithLogSpread) {
  const std::vector<Point> two{{0, 0}, {1, 0}};
  const std::vector<Point> three{{0, 0}, {1, 0}, {1 + std::ldexp(1.0, -10), 0}};
  const std::size_t a = refine(two).steiner_count;
  const std::size_t b = refine(three).steiner_count;
  EXPECT_GT(b, a + 10);
  // Roughly linear in log spread, not in spread.
  EXPECT_LT(b, a + 1000);
}

TEST(Refine, WellSpacedGridNeedsFewSteinerPoints) {
  std::vector<Point> p;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) p.push_back({i + 0.5 * (j % 2), j * 0.8660254037844386});
  }
  const MeshResult m = refine(p);
  expect_well_spaced(m, p, 3);
  EXPECT_LT(m.steiner_count, 5 * p.size());
}

TEST(Refine, FeatureSizeCondition) {
  for (std::uint64_t seed = 11; seed <= 13; ++seed) {
    const auto p = random_points(seed, 40);
    const MeshResult m = refine(p);
    const FeatureSizeReport r = check_feature_size(m.triangulation, p, MesherConfig{}.feature_constant());
    EXPECT_GT(r.checked, 0u);
    EXPECT_TRUE(r.ok()) << r.violations.size() << " of " << r.checked;
  }
}

TEST(Refine, Deterministic) {
  const auto p = random_points(3, 80);
  EXPECT_EQ(refine(p).triangulation.simplices(), refine(p).triangulation.simplices());
}

TEST(Refine, Errors) {
  const std::vector<Point> dup{{0, 0}, {1, 1}, {0, 0}};
  try {
    refine(dup);
    FAIL();
  } catch (const DuplicatePointError& e) {
    EXPECT_EQ(e.index(), 2u);
  }
  MesherConfig bad;
  bad.tau = 2;
  EXPECT_THROW(refine(random_points(1, 5), bad), PreconditionError);
  MesherConfig tiny;
  tiny.max_points = 20;
  EXPECT_THROW(refine(random_points(1, 10), tiny), MeshError);
  EXPECT_THROW(refine(std::vector<Point>{}), PreconditionError);
}

}  // namespace
}  // namespace meshvor
