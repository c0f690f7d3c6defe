#pragma once

// Voronoi refinement: insert the input, then repeatedly insert the farthest
// Voronoi vertex of any cell whose aspect ratio exceeds tau.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "meshvor/complex.hpp"
#include "meshvor/errors.hpp"
#include "meshvor/kernel.hpp"

namespace meshvor {

struct MesherConfig {
  double tau = 3.0;
  double box_scale = 3.0;
  std::size_t max_points = 1'000'000;

  /// Feature-size constant K = 2 tau / (tau - 2).
  double feature_constant() const { return 2.0 * tau / (tau - 2.0); }

  void check() const {
    if (!(tau > 2.0) || !std::isfinite(tau)) throw PreconditionError("mesher: tau must be a finite value > 2");
    if (!(box_scale >= 2.0) || !std::isfinite(box_scale)) {
      throw PreconditionError("mesher: box_scale must be a finite value >= 2");
    }
    if (max_points < 4) throw PreconditionError("mesher: max_points must be at least 4");
  }
};

struct AspectEntry {
  VertexId v;
  double aspect;
};

struct MeshResult {
  Triangulation triangulation;
  std::array<Point, 4> box{};
  std::size_t steiner_count = 0;
  std::size_t boundary_splits = 0;
  std::vector<AspectEntry> aspect_report;
};

/// Axis-aligned square around P, ccw from the lower-left corner.
inline std::array<Point, 4> bounding_box(std::span<const Point> pts, double scale) {
  if (pts.empty()) throw PreconditionError("bounding_box: empty point set");
  double x0 = pts[0].x, x1 = pts[0].x, y0 = pts[0].y, y1 = pts[0].y;
  for (const Point& p : pts) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw DegenerateError("bounding_box: non-finite point");
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  double extent = std::max(x1 - x0, y1 - y0);
  if (extent == 0.0) extent = 1.0;
  const double half = 0.5 * scale * extent;
  const double cx = 0.5 * x0 + 0.5 * x1, cy = 0.5 * y0 + 0.5 * y1;
  const std::array<Point, 4> box{{{cx - half, cy - half}, {cx + half, cy - half}, {cx + half, cy + half}, {cx - half, cy + half}}};
  for (const Point& p : pts) {
    if (!(box[0].x < p.x && p.x < box[2].x && box[0].y < p.y && p.y < box[2].y)) {
      throw DegenerateError("bounding_box: box does not strictly contain the input");
    }
  }
  return box;
}

namespace detail {

inline Dyadic dist2_exact(Point a, Point b) {
  const Dyadic dx = Dyadic(a.x) - Dyadic(b.x), dy = Dyadic(a.y) - Dyadic(b.y);
  return dx * dx + dy * dy;
}

inline void require_interior(const Triangulation& t, VertexId v) {
  if (t.vertex(v).removed) throw PreconditionError("aspect: removed vertex");
  if (t.is_hull_vertex(v)) throw PreconditionError("aspect: hull vertex has an unbounded cell");
}

/// Nearest Delaunay neighbor distance squared, exact.
inline Dyadic nearest_neighbor_sq(const Triangulation& t, VertexId v) {
  std::optional<Dyadic> best;
  const Point p = t.point(v);
  for (const VertexId u : t.neighbors(v)) {
    Dyadic d = dist2_exact(p, t.point(u));
    if (!best || (d - *best).sign() < 0) best = std::move(d);
  }
  return *best;
}

/// Exact 4 R^2 / d^2 where R is the distance to the farthest incident
/// circumcenter and d the nearest neighbor distance.
inline mpq_class aspect_sq_exact(const Triangulation& t, VertexId v) {
  const Point p = t.point(v);
  mpq_class r2 = 0;
  for (const TriangleRef r : t.incident_triangles(v)) {
    const Triangle& tri = t.triangle(r);
    const int i = tri.index_of_vertex(v);
    const CircumcenterParts c = circumcenter_parts(p, t.point(tri.v[next3(i)]), t.point(tri.v[prev3(i)]));
    const mpq_class num = (c.nx * c.nx + c.ny * c.ny).to_rational();
    const mpq_class den = (c.den * c.den).to_rational();
    const mpq_class q = num / den;
    if (q > r2) r2 = q;
  }
  return 4 * r2 / nearest_neighbor_sq(t, v).to_rational();
}

/// Does the triangle (v, b, c) put a circumcenter beyond tau^2 d2 / 4?
/// Floating filter first, exact on skinny triangles or near-ties.
inline bool circumcenter_too_far(Point v, Point b, Point c, double d2, const Dyadic& d2_exact, double tau) {
  const double bx = b.x - v.x, by = b.y - v.y, cx = c.x - v.x, cy = c.y - v.y;
  const double b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
  const double cross = bx * cy - by * cx;
  if (std::fabs(cross) > 1e-6 * std::sqrt(b2 * c2) && d2 > 0.0) {
    const double nx = cy * b2 - by * c2, ny = bx * c2 - cx * b2;
    // 4 R^2 = (nx^2 + ny^2) / cross^2
    const double ratio = (nx * nx + ny * ny) / (cross * cross) / (tau * tau * d2);
    if (std::isfinite(ratio)) {
      if (ratio > 1.0 + 1e-7) return true;
      if (ratio < 1.0 - 1e-7) return false;
    }
  }
  const CircumcenterParts p = circumcenter_parts(v, b, c);
  // (nx^2 + ny^2) / den^2 = R^2; test 4 R^2 > tau^2 d^2.
  const Dyadic t(tau);
  const Dyadic lhs = Dyadic(4.0) * (p.nx * p.nx + p.ny * p.ny);
  const Dyadic rhs = t * t * d2_exact * p.den * p.den;
  return (lhs - rhs).sign() > 0;
}

}  // namespace detail

/// Out-radius over in-radius of v's Voronoi cell.
inline double aspect(const Triangulation& t, VertexId v) {
  detail::require_interior(t, v);
  return std::sqrt(detail::aspect_sq_exact(t, v).get_d());
}

/// Exact test aspect(v) > tau.
inline bool aspect_exceeds(const Triangulation& t, VertexId v, double tau) {
  detail::require_interior(t, v);
  const Point p = t.point(v);
  const detail::Dyadic d2x = detail::nearest_neighbor_sq(t, v);
  const double d2 = d2x.to_rational().get_d();
  for (const TriangleRef r : t.incident_triangles(v)) {
    const Triangle& tri = t.triangle(r);
    const int i = tri.index_of_vertex(v);
    if (detail::circumcenter_too_far(p, t.point(tri.v[next3(i)]), t.point(tri.v[prev3(i)]), d2, d2x, tau)) {
      return true;
    }
  }
  return false;
}

/// Exact post-condition: every interior vertex has aspect <= tau. Returns the
/// first offending vertex.
inline std::optional<VertexId> find_badly_spaced(const Triangulation& t, double tau) {
  const mpq_class tau2 = mpq_class(tau) * mpq_class(tau);
  for (const VertexId v : t.live_vertices()) {
    if (t.is_hull_vertex(v)) continue;
    if (detail::aspect_sq_exact(t, v) > tau2) return v;
  }
  return std::nullopt;
}

struct FeatureSizeReport {
  std::size_t checked = 0;
  std::vector<VertexId> violations;
  bool ok() const { return violations.empty(); }
};

/// For every Steiner vertex v: f_P(v) <= K f_M(v), with f_P the distance to
/// the second nearest input point and f_M the distance to the nearest other
/// vertex of M. Exact. Needs at least two inputs for f_P to be finite.
inline FeatureSizeReport check_feature_size(const Triangulation& t, std::span<const Point> input, double K) {
  FeatureSizeReport rep;
  if (input.size() < 2) return rep;
  const mpq_class k2 = mpq_class(K) * mpq_class(K);
  for (const VertexId v : t.live_vertices()) {
    if (t.vertex(v).kind != WeightClass::Steiner) continue;
    const Point p = t.point(v);
    std::optional<detail::Dyadic> first, second;
    for (const Point& q : input) {
      detail::Dyadic d = detail::dist2_exact(p, q);
      if (!first || (d - *first).sign() < 0) {
        second = std::move(first);
        first = std::move(d);
      } else if (!second || (d - *second).sign() < 0) {
        second = std::move(d);
      }
    }
    ++rep.checked;
    const mpq_class fp2 = second->to_rational();
    const mpq_class fm2 = detail::nearest_neighbor_sq(t, v).to_rational();
    if (fp2 > k2 * fm2) rep.violations.push_back(v);
  }
  return rep;
}

namespace detail {

class Refiner {
 public:
  Refiner(std::span<const Point> input, const MesherConfig& cfg)
      : input_(input), cfg_(cfg), box_(bounding_box(input, cfg.box_scale)), t_(Triangulation::init_box(box_)) {}

  MeshResult run() {
    for (std::size_t i = 0; i < input_.size(); ++i) {
      try {
        t_.insert_vertex(input_[i], WeightClass::Input);
      } catch (const DuplicatePointError& e) {
        const std::size_t other = e.index() - 4;
        throw DuplicatePointError("duplicate input point " + std::to_string(i) + " (same as point " +
                                      std::to_string(other) + ")",
                                  i);
      }
    }
    for (const VertexId v : t_.live_vertices()) push(v);
    while (!queue_.empty()) {
      const VertexId v = queue_.front();
      queue_.pop_front();
      queued_[index_of(v)] = false;
      if (t_.vertex(v).removed || t_.is_hull_vertex(v)) continue;
      if (!aspect_exceeds(t_, v, cfg_.tau)) continue;
      clean(v);
    }
    MeshResult out{std::move(t_), box_, steiner_, splits_, {}};
    for (const VertexId v : out.triangulation.live_vertices()) {
      if (out.triangulation.is_hull_vertex(v)) continue;
      out.aspect_report.push_back({v, aspect(out.triangulation, v)});
    }
    return out;
  }

 private:
  void push(VertexId v) {
    const std::size_t i = index_of(v);
    if (i >= queued_.size()) queued_.resize(i + 1, false);
    if (queued_[i]) return;
    queued_[i] = true;
    queue_.push_back(v);
  }

  bool strictly_inside(Point p) const {
    return box_[0].x < p.x && p.x < box_[2].x && box_[0].y < p.y && p.y < box_[2].y;
  }

  void clean(VertexId v) {
    const Point p = t_.point(v);
    // Farthest incident circumcenter, compared exactly.
    mpq_class best_r2 = -1;
    Point best{};
    for (const TriangleRef r : t_.incident_triangles(v)) {
      const Triangle& tri = t_.triangle(r);
      const int i = tri.index_of_vertex(v);
      const CircumcenterParts c = circumcenter_parts(p, t_.point(tri.v[next3(i)]), t_.point(tri.v[prev3(i)]));
      const mpq_class den = c.den.to_rational();
      const mpq_class ux = c.nx.to_rational() / den, uy = c.ny.to_rational() / den;
      const mpq_class r2 = ux * ux + uy * uy;
      if (r2 > best_r2) {
        best_r2 = r2;
        best = {mpq_class(mpq_class(p.x) + ux).get_d(), mpq_class(mpq_class(p.y) + uy).get_d()};
      }
    }
    VertexId w;
    if (const auto seg = encroached_segment(p, best)) {
      w = split(*seg);
    } else {
      w = insert(best);
    }
    push(w);
    for (const VertexId u : t_.neighbors(w)) push(u);
    push(v);
  }

  VertexId insert(Point x) {
    if (t_.live_vertex_count() >= cfg_.max_points) {
      throw MeshError("mesher: max_points (" + std::to_string(cfg_.max_points) + ") exceeded");
    }
    try {
      const VertexId w = t_.insert_vertex(x, WeightClass::Steiner);
      ++steiner_;
      return w;
    } catch (const DuplicatePointError&) {
      throw MeshError("mesher: Steiner point collapsed onto an existing vertex (coordinate resolution exhausted)");
    }
  }

  // Boundary vertices per box side, as coordinates along the side:
  // 0 bottom and 2 top hold x, 1 right and 3 left hold y.
  struct Segment {
    int side;
    double lo, hi;
  };

  double side_line(int side) const {
    switch (side) {
      case 0: return box_[0].y;
      case 1: return box_[2].x;
      case 2: return box_[2].y;
      default: return box_[0].x;
    }
  }
  static double along(int side, Point c) { return side % 2 == 0 ? c.x : c.y; }
  double depth(int side, Point c) const {
    switch (side) {
      case 0: return c.y - box_[0].y;
      case 1: return box_[2].x - c.x;
      case 2: return box_[2].y - c.y;
      default: return c.x - box_[0].x;
    }
  }

  std::optional<Segment> segment_at(int side, double u) const {
    const std::set<double>& s = sides_[side];
    if (u < *s.begin() || u > *s.rbegin()) return std::nullopt;
    auto hi = s.upper_bound(u);
    if (hi == s.end()) --hi;
    auto lo = std::prev(hi);
    return Segment{side, *lo, *hi};
  }

  /// Boundary segment to split instead of inserting c: the one c lies
  /// outside of, or whose diametral disk contains c.
  std::optional<Segment> encroached_segment(Point v, Point c) const {
    if (!strictly_inside(c)) return exit_segment(v, c);
    for (int side = 0; side < 4; ++side) {
      const auto seg = segment_at(side, along(side, c));
      if (!seg) continue;
      const double u = along(side, c), h = depth(side, c);
      if ((u - seg->lo) * (u - seg->hi) + h * h < 0.0) return seg;
    }
    return std::nullopt;
  }

  /// Segment where the ray from v toward c leaves the box.
  Segment exit_segment(Point v, Point c) const {
    double s = 0.0;
    int side = -1;
    const double dx = c.x - v.x, dy = c.y - v.y;
    auto consider = [&](double num, double den, int which) {
      if (den == 0.0) return;
      const double k = num / den;
      if (k >= 0.0 && (side < 0 || k < s)) {
        s = k;
        side = which;
      }
    };
    if (c.y <= box_[0].y) consider(box_[0].y - v.y, dy, 0);
    if (c.x >= box_[2].x) consider(box_[2].x - v.x, dx, 1);
    if (c.y >= box_[2].y) consider(box_[2].y - v.y, dy, 2);
    if (c.x <= box_[0].x) consider(box_[0].x - v.x, dx, 3);
    if (side < 0) throw MeshError("mesher: circumcenter outside the box but no exit side found");
    const std::set<double>& pts = sides_[side];
    const double u = std::clamp(side % 2 == 0 ? v.x + s * dx : v.y + s * dy, *pts.begin(), *pts.rbegin());
    const auto at = pts.find(u);
    if (at == pts.end()) return *segment_at(side, u);
    // Exactly on a boundary vertex: take the longer neighboring segment.
    std::optional<Segment> left, right;
    if (at != pts.begin()) left = Segment{side, *std::prev(at), *at};
    if (std::next(at) != pts.end()) right = Segment{side, *at, *std::next(at)};
    if (!left) return *right;
    if (!right) return *left;
    return (left->hi - left->lo) >= (right->hi - right->lo) ? *left : *right;
  }

  VertexId split(const Segment& seg) {
    const double mid = 0.5 * seg.lo + 0.5 * seg.hi;
    if (!(seg.lo < mid && mid < seg.hi)) throw MeshError("mesher: boundary segment too short to split");
    const double line = side_line(seg.side);
    const Point m = seg.side % 2 == 0 ? Point{mid, line} : Point{line, mid};
    const VertexId w = insert(m);
    sides_[seg.side].insert(mid);
    ++splits_;
    return w;
  }

  std::span<const Point> input_;
  MesherConfig cfg_;
  std::array<Point, 4> box_;
  Triangulation t_;
  std::deque<VertexId> queue_;
  std::vector<bool> queued_;
  std::size_t steiner_ = 0;
  std::size_t splits_ = 0;
  std::array<std::set<double>, 4> sides_{{{box_[0].x, box_[2].x}, {box_[0].y, box_[2].y}, {box_[0].x, box_[2].x}, {box_[0].y, box_[2].y}}};
};

}  // namespace detail

/// Builds a tau-well-spaced superset of the input inside the bounding box.
/// Vertex ids: box corners 0..3, input i at 4 + i, then Steiner points.
inline MeshResult refine(std::span<const Point> input, const MesherConfig& cfg = {}) {
  cfg.check();
  if (input.empty()) throw PreconditionError("refine: empty input");
  return detail::Refiner(input, cfg).run();
}

}  // namespace meshvor
