#pragma once

// Mutable 2D triangulation with per-triangle neighbor links.
//
// Triangle slots are reused through a free list; every time a slot receives
// a new vertex triple its stamp is set from a global counter, so a
// (slot, stamp) pair names one triangle configuration forever. Vertices are
// never compacted: removal only flags them.
//
// The triangulation built by insert_vertex is the Delaunay triangulation of
// its vertex set under the symbolic perturbation of kernel.hpp (vertex id is
// the perturbation priority).

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "meshvor/errors.hpp"
#include "meshvor/kernel.hpp"
#include "meshvor/simplex_set.hpp"

namespace meshvor {

enum class VertexId : std::uint32_t {};
enum class TriangleRef : std::uint32_t {};

inline constexpr TriangleRef kNoTriangle{0xffffffffu};

constexpr std::uint32_t index_of(VertexId v) { return static_cast<std::uint32_t>(v); }
constexpr std::uint32_t index_of(TriangleRef t) { return static_cast<std::uint32_t>(t); }

constexpr int next3(int i) { return i == 2 ? 0 : i + 1; }
constexpr int prev3(int i) { return i == 0 ? 2 : i - 1; }

struct Vertex {
  VertexId id{};
  Point location;
  WeightClass kind = WeightClass::Steiner;
  bool removed = false;
  TriangleRef incident = kNoTriangle;
};

struct Triangle {
  std::array<VertexId, 3> v{};
  /// nbr[i] is across the edge opposite v[i].
  std::array<TriangleRef, 3> nbr{kNoTriangle, kNoTriangle, kNoTriangle};
  std::uint64_t stamp = 0;
  bool alive = false;

  int index_of_vertex(VertexId x) const {
    for (int i = 0; i < 3; ++i) {
      if (v[i] == x) return i;
    }
    return -1;
  }
};

/// An edge named by a triangle and the local index of the opposite vertex.
struct EdgeRef {
  TriangleRef tri = kNoTriangle;
  int index = 0;

  friend bool operator==(const EdgeRef&, const EdgeRef&) = default;
};

/// Canonical undirected edge (lo, hi).
struct EdgeKey {
  VertexId lo{};
  VertexId hi{};

  static EdgeKey of(VertexId a, VertexId b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }
  friend auto operator<=>(const EdgeKey&, const EdgeKey&) = default;
};

enum class Containment : std::uint8_t { Interior, OnEdge, OnVertex };

struct Location {
  TriangleRef tri = kNoTriangle;
  Containment kind = Containment::Interior;
  /// Edge index for OnEdge, vertex index for OnVertex.
  int index = 0;
};

enum class ViolationKind : std::uint8_t {
  DeadVertex,
  Orientation,
  NeighborSymmetry,
  IncidentLink,
  LocalOverlap,
  Euler,
  Tiling,
};

struct Violation {
  ViolationKind kind;
  std::string where;
};

inline const char* to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::DeadVertex: return "dead-vertex";
    case ViolationKind::Orientation: return "orientation";
    case ViolationKind::NeighborSymmetry: return "neighbor-symmetry";
    case ViolationKind::IncidentLink: return "incident-link";
    case ViolationKind::LocalOverlap: return "local-overlap";
    case ViolationKind::Euler: return "euler";
    case ViolationKind::Tiling: return "tiling";
  }
  return "?";
}

class Triangulation {
 public:
  /// Two-triangle triangulation of a convex quadrilateral given in either
  /// cyclic order. The diagonal is the Delaunay one under the perturbation.
  static Triangulation init_box(std::span<const Point, 4> corners) {
    return init_box(corners, {WeightClass::Box, WeightClass::Box, WeightClass::Box, WeightClass::Box});
  }

  /// Same, with an explicit kind per corner.
  static Triangulation init_box(std::span<const Point, 4> corners, std::array<WeightClass, 4> kinds) {
    std::array<Point, 4> c{corners[0], corners[1], corners[2], corners[3]};
    std::array<Sign, 4> turn{};
    for (int i = 0; i < 4; ++i) turn[i] = orient2d(c[i], c[(i + 1) % 4], c[(i + 2) % 4]);
    const bool ccw = std::all_of(turn.begin(), turn.end(), [](Sign s) { return s == Sign::Positive; });
    const bool cw = std::all_of(turn.begin(), turn.end(), [](Sign s) { return s == Sign::Negative; });
    if (!ccw && !cw) throw DegenerateError("init_box: corners are not in strictly convex position");
    if (cw) {
      std::swap(c[1], c[3]);
      std::swap(kinds[1], kinds[3]);
    }

    Triangulation t;
    for (int i = 0; i < 4; ++i) t.add_vertex(c[i], kinds[i]);
    const std::array<VertexId, 4> q{VertexId{0}, VertexId{1}, VertexId{2}, VertexId{3}};
    // Diagonal 0-2 is legal iff vertex 3 does not encroach triangle (0,1,2).
    const bool diag02 =
        t.incircle(q[0], q[1], q[2], q[3]) == Sign::Positive;
    const auto [a, b] = diag02 ? std::pair{0, 2} : std::pair{1, 3};
    const TriangleRef t0 = t.new_triangle(q[a], q[(a + 1) % 4], q[b]);
    const TriangleRef t1 = t.new_triangle(q[b], q[(b + 1) % 4], q[a]);
    t.tri(t0).nbr[1] = t1;
    t.tri(t1).nbr[1] = t0;
    for (const VertexId v : q) t.refresh_incident(v);
    return t;
  }

  std::size_t vertex_slots() const { return vertices_.size(); }
  std::size_t triangle_slots() const { return triangles_.size(); }
  std::size_t live_vertex_count() const { return vertices_.size() - removed_vertices_; }
  std::size_t live_triangle_count() const { return triangles_.size() - free_.size(); }

  const Vertex& vertex(VertexId v) const { return vertices_.at(index_of(v)); }
  const Triangle& triangle(TriangleRef t) const { return triangles_.at(index_of(t)); }
  Point point(VertexId v) const { return vertex(v).location; }
  Site site(VertexId v) const {
    const Vertex& x = vertex(v);
    return {x.location, x.kind, index_of(v)};
  }

  bool is_live(TriangleRef t) const {
    return t != kNoTriangle && index_of(t) < triangles_.size() && triangles_[index_of(t)].alive;
  }

  /// Vertices of the edge (ordered as they appear ccw in e.tri).
  std::pair<VertexId, VertexId> edge_vertices(EdgeRef e) const {
    const Triangle& t = triangle(e.tri);
    return {t.v[next3(e.index)], t.v[prev3(e.index)]};
  }
  EdgeKey edge_key(EdgeRef e) const {
    const auto [a, b] = edge_vertices(e);
    return EdgeKey::of(a, b);
  }
  bool is_interior(EdgeRef e) const { return triangle(e.tri).nbr[e.index] != kNoTriangle; }

  /// Index in `other` of the vertex opposite the edge shared with `t`.
  int mirror_index(TriangleRef t, int i) const {
    const Triangle& a = triangle(t);
    const Triangle& b = triangle(a.nbr[i]);
    for (int j = 0; j < 3; ++j) {
      if (b.nbr[j] == t && b.v[j] != a.v[next3(i)] && b.v[j] != a.v[prev3(i)]) return j;
    }
    for (int j = 0; j < 3; ++j) {
      if (b.v[j] != a.v[next3(i)] && b.v[j] != a.v[prev3(i)]) return j;
    }
    return -1;
  }

  /// Triangle whose closure contains x, found by a visibility walk from the
  /// most recently created triangle.
  Location locate(Point x) const {
    TriangleRef cur = is_live(last_) ? last_ : first_live();
    if (cur == kNoTriangle) throw PreconditionError("locate: empty triangulation");
    const std::size_t limit = 4 * triangles_.size() + 16;
    for (std::size_t step = 0; step < limit; ++step) {
      const Triangle& t = triangle(cur);
      int crossed = -1;
      std::array<Sign, 3> side{};
      const int start = static_cast<int>(step % 3);
      for (int r = 0; r < 3; ++r) {
        const int k = (start + r) % 3;
        side[k] = orient2d(point(t.v[next3(k)]), point(t.v[prev3(k)]), x);
        if (side[k] == Sign::Negative) {
          crossed = k;
          break;
        }
      }
      if (crossed < 0) return classify(cur, side);
      if (t.nbr[crossed] == kNoTriangle) throw PreconditionError("locate: point outside the hull");
      cur = t.nbr[crossed];
    }
    // Visibility walks terminate on Delaunay triangulations; this scan only
    // guards against misuse on non-regular intermediate states.
    for (std::uint32_t i = 0; i < triangles_.size(); ++i) {
      const TriangleRef r{i};
      if (!triangles_[i].alive) continue;
      std::array<Sign, 3> side{};
      bool inside = true;
      for (int k = 0; k < 3; ++k) {
        side[k] = orient2d(point(triangles_[i].v[next3(k)]), point(triangles_[i].v[prev3(k)]), x);
        if (side[k] == Sign::Negative) inside = false;
      }
      if (inside) return classify(r, side);
    }
    throw PreconditionError("locate: point outside the hull");
  }

  /// Inserts x and restores the (perturbed) Delaunay property by edge flips.
  VertexId insert_vertex(Point x, WeightClass kind) {
    if (!std::isfinite(x.x) || !std::isfinite(x.y)) throw DegenerateError("insert_vertex: non-finite point");
    const Location loc = locate(x);
    if (loc.kind == Containment::OnVertex) {
      const VertexId dup = triangle(loc.tri).v[loc.index];
      throw DuplicatePointError("insert_vertex: point coincides with vertex " + std::to_string(index_of(dup)),
                                index_of(dup));
    }
    const VertexId p = add_vertex(x, kind);
    std::vector<FanEdge> chain;
    std::vector<TriangleRef> dead;
    bool closed = true;
    const Triangle t = triangle(loc.tri);
    if (loc.kind == Containment::Interior) {
      dead = {loc.tri};
      for (int k = 0; k < 3; ++k) chain.push_back({t.v[k], t.v[next3(k)], t.nbr[prev3(k)]});
    } else {
      const int k = loc.index;
      const VertexId c = t.v[k], a = t.v[next3(k)], b = t.v[prev3(k)];
      dead = {loc.tri};
      if (t.nbr[k] == kNoTriangle) {
        closed = false;
        chain.push_back({b, c, t.nbr[next3(k)]});
        chain.push_back({c, a, t.nbr[prev3(k)]});
      } else {
        const TriangleRef u = t.nbr[k];
        const int j = mirror_index(loc.tri, k);
        const Triangle ut = triangle(u);
        const VertexId d = ut.v[j];
        dead.push_back(u);
        chain.push_back({b, c, t.nbr[next3(k)]});
        chain.push_back({c, a, t.nbr[prev3(k)]});
        chain.push_back({a, d, ut.nbr[next3(j)]});
        chain.push_back({d, b, ut.nbr[prev3(j)]});
      }
    }
    for (const TriangleRef d : dead) kill(d);
    const std::vector<TriangleRef> fan = build_fan(p, chain, closed);
    legalize(p, fan);
    return p;
  }

  /// Swaps the diagonal of the strictly convex quadrilateral around e.
  /// Returns the new diagonal.
  EdgeRef flip22(EdgeRef e) {
    if (!is_live(e.tri)) throw PreconditionError("flip22: dead triangle");
    Triangle& t = tri(e.tri);
    const TriangleRef ur = t.nbr[e.index];
    if (ur == kNoTriangle) throw PreconditionError("flip22: hull edge");
    const int i = e.index;
    const int j = mirror_index(e.tri, i);
    Triangle& u = tri(ur);
    const VertexId c = t.v[i], a = t.v[next3(i)], b = t.v[prev3(i)], d = u.v[j];
    if (orient2d(point(c), point(d), point(a)) != Sign::Negative ||
        orient2d(point(d), point(c), point(b)) != Sign::Negative) {
      throw PreconditionError("flip22: quadrilateral is not strictly convex");
    }
    return flip22_unchecked(e);
  }

  /// Removes an interior vertex of degree four that lies on the open segment
  /// between the apexes c, d of the edge e = (a, b), where the vertex is a or
  /// b: its four triangles become two sharing the edge cd. Returns the two.
  std::array<TriangleRef, 2> flip42(EdgeRef e) {
    if (!is_interior(e)) throw PreconditionError("flip42: hull edge");
    const Triangle& t = triangle(e.tri);
    const int j = mirror_index(e.tri, e.index);
    const VertexId c = t.v[e.index], a = t.v[next3(e.index)], b = t.v[prev3(e.index)];
    const VertexId d = triangle(t.nbr[e.index]).v[j];
    const Sign at_a = orient2d(point(c), point(d), point(a));
    const Sign at_b = orient2d(point(d), point(c), point(b));
    VertexId v;
    if (at_a == Sign::Zero && at_b == Sign::Negative) {
      v = a;
    } else if (at_b == Sign::Zero && at_a == Sign::Negative) {
      v = b;
    } else {
      throw PreconditionError("flip42: no vertex of the edge lies between the apexes");
    }
    if (is_hull_vertex(v) || vertex_degree(v) != 4) throw PreconditionError("flip42: vertex is not interior of degree 4");
    const EdgeRef ne = flip22_unchecked(e);
    // (c, a, d) is flat when v == a, (d, b, c) when v == b.
    const TriangleRef keep = v == a ? triangle(ne.tri).nbr[ne.index] : ne.tri;
    return {flip31(v), keep};
  }

 private:
  EdgeRef flip22_unchecked(EdgeRef e) {
    Triangle& t = tri(e.tri);
    const TriangleRef ur = t.nbr[e.index];
    const int i = e.index;
    const int j = mirror_index(e.tri, i);
    Triangle& u = tri(ur);
    const VertexId c = t.v[i], a = t.v[next3(i)], b = t.v[prev3(i)], d = u.v[j];
    const TriangleRef t_ca = t.nbr[prev3(i)];  // across (c, a)
    const TriangleRef t_bc = t.nbr[next3(i)];  // across (b, c)
    const TriangleRef u_ad = u.nbr[next3(j)];  // across (a, d)
    const TriangleRef u_db = u.nbr[prev3(j)];  // across (d, b)
    set_triangle(e.tri, {c, a, d}, {u_ad, ur, t_ca});
    set_triangle(ur, {d, b, c}, {t_bc, e.tri, u_db});
    relink(u_ad, a, d, e.tri);
    relink(t_bc, b, c, ur);
    for (const VertexId v : {a, c, d}) vertices_[index_of(v)].incident = e.tri;
    vertices_[index_of(b)].incident = ur;
    last_ = e.tri;
    return {e.tri, 1};
  }

 public:

  /// Removes an interior vertex of degree three, merging its star into one
  /// triangle.
  TriangleRef flip31(VertexId v) {
    if (vertex(v).removed) throw PreconditionError("flip31: vertex already removed");
    const std::vector<TriangleRef> star = incident_triangles(v);
    if (is_hull_vertex(v)) throw PreconditionError("flip31: hull vertex");
    if (star.size() != 3) throw PreconditionError("flip31: vertex degree is not 3");
    // Each star triangle (v, a_k, b_k) is ccw and b_k == a_{k+1}.
    std::array<VertexId, 3> ring{};
    std::array<TriangleRef, 3> outer{};
    for (int k = 0; k < 3; ++k) {
      const Triangle& t = triangle(star[k]);
      const int i = t.index_of_vertex(v);
      ring[k] = t.v[next3(i)];
      outer[k] = t.nbr[i];
    }
    for (const TriangleRef s : star) kill(s);
    const TriangleRef r = new_triangle(ring[0], ring[1], ring[2]);
    // Edge (ring[k], ring[k+1]) is opposite ring[k+2].
    for (int k = 0; k < 3; ++k) {
      tri(r).nbr[(k + 2) % 3] = outer[k];
      relink(outer[k], ring[k], ring[(k + 1) % 3], r);
    }
    for (const VertexId w : ring) vertices_[index_of(w)].incident = r;
    Vertex& gone = vertices_[index_of(v)];
    gone.removed = true;
    gone.incident = kNoTriangle;
    ++removed_vertices_;
    return r;
  }

  /// Triangles around v in ccw order. For hull vertices the list starts at
  /// the triangle on the clockwise-most side.
  std::vector<TriangleRef> incident_triangles(VertexId v) const {
    std::vector<TriangleRef> out;
    const TriangleRef start = vertex(v).incident;
    if (start == kNoTriangle) return out;
    auto ccw_next = [&](TriangleRef r) {
      const Triangle& t = triangle(r);
      return t.nbr[next3(t.index_of_vertex(v))];
    };
    TriangleRef cur = start;
    do {
      out.push_back(cur);
      cur = ccw_next(cur);
    } while (cur != kNoTriangle && cur != start);
    if (cur == start) return out;
    // Hull vertex: rewind clockwise to the first triangle and walk again.
    TriangleRef first = start;
    for (;;) {
      const Triangle& t = triangle(first);
      const TriangleRef cw = t.nbr[prev3(t.index_of_vertex(v))];
      if (cw == kNoTriangle) break;
      first = cw;
    }
    out.clear();
    for (cur = first; cur != kNoTriangle; cur = ccw_next(cur)) out.push_back(cur);
    return out;
  }

  /// Delaunay neighbors of v in ccw order.
  std::vector<VertexId> neighbors(VertexId v) const {
    std::vector<VertexId> out;
    const auto star = incident_triangles(v);
    for (const TriangleRef r : star) {
      const Triangle& t = triangle(r);
      out.push_back(t.v[next3(t.index_of_vertex(v))]);
    }
    if (!star.empty() && is_hull_vertex(v)) {
      const Triangle& t = triangle(star.back());
      out.push_back(t.v[prev3(t.index_of_vertex(v))]);
    }
    return out;
  }

  std::size_t vertex_degree(VertexId v) const { return neighbors(v).size(); }

  bool is_hull_vertex(VertexId v) const {
    const TriangleRef start = vertex(v).incident;
    if (start == kNoTriangle) return false;
    TriangleRef cur = start;
    do {
      const Triangle& t = triangle(cur);
      cur = t.nbr[next3(t.index_of_vertex(v))];
    } while (cur != kNoTriangle && cur != start);
    return cur == kNoTriangle;
  }

  /// Each interior edge once, named from the triangle with the smaller slot.
  std::vector<EdgeRef> interior_edge_refs() const {
    std::vector<EdgeRef> out;
    for (std::uint32_t i = 0; i < triangles_.size(); ++i) {
      const Triangle& t = triangles_[i];
      if (!t.alive) continue;
      for (int k = 0; k < 3; ++k) {
        if (t.nbr[k] != kNoTriangle && i < index_of(t.nbr[k])) out.push_back({TriangleRef{i}, k});
      }
    }
    return out;
  }

  std::vector<EdgeKey> interior_edges() const {
    std::vector<EdgeKey> out;
    for (const EdgeRef e : interior_edge_refs()) out.push_back(edge_key(e));
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Finds the triangle-side reference of an edge between two vertices.
  std::optional<EdgeRef> find_edge(VertexId a, VertexId b) const {
    for (const TriangleRef r : incident_triangles(a)) {
      const Triangle& t = triangle(r);
      const int i = t.index_of_vertex(a);
      if (t.v[next3(i)] == b) return EdgeRef{r, prev3(i)};
      if (t.v[prev3(i)] == b) return EdgeRef{r, next3(i)};
    }
    return std::nullopt;
  }

  std::vector<VertexId> live_vertices() const {
    std::vector<VertexId> out;
    for (const Vertex& v : vertices_) {
      if (!v.removed) out.push_back(v.id);
    }
    return out;
  }

  std::vector<TriangleRef> live_triangles() const {
    std::vector<TriangleRef> out;
    for (std::uint32_t i = 0; i < triangles_.size(); ++i) {
      if (triangles_[i].alive) out.push_back(TriangleRef{i});
    }
    return out;
  }

  /// Every live vertex, edge and triangle, labeled by vertex id.
  SimplexSet simplices() const {
    SimplexSet s;
    for (const TriangleRef r : live_triangles()) {
      const Triangle& t = triangle(r);
      s.triangles.push_back(SimplexSet::make_triangle(index_of(t.v[0]), index_of(t.v[1]), index_of(t.v[2])));
    }
    for (const VertexId v : live_vertices()) s.vertices.push_back(index_of(v));
    s.close();
    return s;
  }

  /// Checks all structural invariants; returns the first violation found.
  std::optional<Violation> validate() const {
    auto fail = [](ViolationKind k, std::string w) { return std::optional<Violation>(Violation{k, std::move(w)}); };
    for (std::uint32_t i = 0; i < triangles_.size(); ++i) {
      const Triangle& t = triangles_[i];
      if (!t.alive) continue;
      const std::string where = "triangle " + std::to_string(i);
      for (const VertexId v : t.v) {
        if (index_of(v) >= vertices_.size() || vertex(v).removed) {
          return fail(ViolationKind::DeadVertex, where + " references vertex " + std::to_string(index_of(v)));
        }
      }
      if (orient2d(point(t.v[0]), point(t.v[1]), point(t.v[2])) != Sign::Positive) {
        return fail(ViolationKind::Orientation, where);
      }
      for (int k = 0; k < 3; ++k) {
        const TriangleRef n = t.nbr[k];
        if (n == kNoTriangle) continue;
        if (!is_live(n)) return fail(ViolationKind::NeighborSymmetry, where + " links a dead slot");
        const Triangle& u = triangle(n);
        const VertexId a = t.v[next3(k)], b = t.v[prev3(k)];
        int back = -1;
        for (int j = 0; j < 3; ++j) {
          if (u.nbr[j] == TriangleRef{i}) back = j;
        }
        if (back < 0 || u.v[next3(back)] != b || u.v[prev3(back)] != a) {
          return fail(ViolationKind::NeighborSymmetry, where + " edge " + std::to_string(k));
        }
        if (orient2d(point(a), point(b), point(u.v[back])) != Sign::Negative) {
          return fail(ViolationKind::LocalOverlap, where + " edge " + std::to_string(k));
        }
      }
    }
    std::size_t hull = 0, interior = 0;
    for (const Vertex& v : vertices_) {
      if (v.removed) continue;
      if (!is_live(v.incident) || triangle(v.incident).index_of_vertex(v.id) < 0) {
        return fail(ViolationKind::IncidentLink, "vertex " + std::to_string(index_of(v.id)));
      }
      (is_hull_vertex(v.id) ? hull : interior) += 1;
    }
    if (live_triangle_count() + 2 != 2 * interior + hull) {
      return fail(ViolationKind::Euler, std::to_string(live_triangle_count()) + " triangles, " +
                                            std::to_string(interior) + " interior, " + std::to_string(hull) +
                                            " hull vertices");
    }
    // Twice the summed triangle area must equal twice the area enclosed by
    // the hull edges.
    detail::Dyadic area, boundary;
    for (const TriangleRef r : live_triangles()) {
      const Triangle& t = triangle(r);
      area = area + detail::orient_exact(point(t.v[0]), point(t.v[1]), point(t.v[2]));
      for (int k = 0; k < 3; ++k) {
        if (t.nbr[k] != kNoTriangle) continue;
        const Point a = point(t.v[next3(k)]), b = point(t.v[prev3(k)]);
        boundary = boundary + detail::Dyadic(a.x) * detail::Dyadic(b.y) - detail::Dyadic(a.y) * detail::Dyadic(b.x);
      }
    }
    if (!(area - boundary).is_zero()) return fail(ViolationKind::Tiling, "area mismatch");
    return std::nullopt;
  }

  /// Perturbed encroachment of d against ccw triangle (a, b, c) at t = 0.
  Sign incircle(VertexId a, VertexId b, VertexId c, VertexId d) const {
    return incircle_perturbed(site(a), site(b), site(c), site(d));
  }

  /// Direct slot access for fault-injection tests only.
  Triangle& triangle_for_testing(TriangleRef t) { return tri(t); }

 private:
  struct FanEdge {
    VertexId from;
    VertexId to;
    TriangleRef outer;
  };

  Triangle& tri(TriangleRef t) { return triangles_.at(index_of(t)); }

  VertexId add_vertex(Point p, WeightClass kind) {
    const VertexId id{static_cast<std::uint32_t>(vertices_.size())};
    vertices_.push_back({id, p, kind, false, kNoTriangle});
    return id;
  }

  TriangleRef first_live() const {
    for (std::uint32_t i = 0; i < triangles_.size(); ++i) {
      if (triangles_[i].alive) return TriangleRef{i};
    }
    return kNoTriangle;
  }

  TriangleRef new_triangle(VertexId a, VertexId b, VertexId c) {
    TriangleRef r;
    if (!free_.empty()) {
      r = free_.back();
      free_.pop_back();
    } else {
      r = TriangleRef{static_cast<std::uint32_t>(triangles_.size())};
      triangles_.emplace_back();
    }
    set_triangle(r, {a, b, c}, {kNoTriangle, kNoTriangle, kNoTriangle});
    tri(r).alive = true;
    return r;
  }

  void set_triangle(TriangleRef r, std::array<VertexId, 3> v, std::array<TriangleRef, 3> n) {
    Triangle& t = tri(r);
    t.v = v;
    t.nbr = n;
    t.stamp = ++stamp_clock_;
    last_ = r;
  }

  void kill(TriangleRef r) {
    Triangle& t = tri(r);
    t.alive = false;
    t.stamp = ++stamp_clock_;
    t.nbr = {kNoTriangle, kNoTriangle, kNoTriangle};
    free_.push_back(r);
  }

  /// Points the neighbor slot of `u` across edge (a, b) at `r`.
  void relink(TriangleRef u, VertexId a, VertexId b, TriangleRef r) {
    if (u == kNoTriangle) return;
    Triangle& t = tri(u);
    for (int j = 0; j < 3; ++j) {
      if (t.v[j] != a && t.v[j] != b) {
        t.nbr[j] = r;
        return;
      }
    }
  }

  void refresh_incident(VertexId v) {
    for (std::uint32_t i = 0; i < triangles_.size(); ++i) {
      if (triangles_[i].alive && triangles_[i].index_of_vertex(v) >= 0) {
        vertices_[index_of(v)].incident = TriangleRef{i};
        return;
      }
    }
  }

  /// Fills a star-shaped cavity with triangles (p, from, to). For an open
  /// chain the first and last fan edges through p lie on the hull.
  std::vector<TriangleRef> build_fan(VertexId p, const std::vector<FanEdge>& chain, bool closed) {
    std::vector<TriangleRef> fan;
    fan.reserve(chain.size());
    for (const FanEdge& e : chain) fan.push_back(new_triangle(p, e.from, e.to));
    const std::size_t m = chain.size();
    for (std::size_t k = 0; k < m; ++k) {
      Triangle& t = tri(fan[k]);
      t.nbr[0] = chain[k].outer;
      const bool has_next = closed || k + 1 < m;
      const bool has_prev = closed || k > 0;
      t.nbr[1] = has_next ? fan[(k + 1) % m] : kNoTriangle;
      t.nbr[2] = has_prev ? fan[(k + m - 1) % m] : kNoTriangle;
      relink(chain[k].outer, chain[k].from, chain[k].to, fan[k]);
      vertices_[index_of(chain[k].from)].incident = fan[k];
      vertices_[index_of(chain[k].to)].incident = fan[k];
    }
    vertices_[index_of(p)].incident = fan.front();
    return fan;
  }

  /// Lawson flips on the edges opposite p until every one is locally
  /// Delaunay.
  void legalize(VertexId p, const std::vector<TriangleRef>& fan) {
    std::vector<TriangleRef> stack(fan.rbegin(), fan.rend());
    while (!stack.empty()) {
      const TriangleRef r = stack.back();
      stack.pop_back();
      const Triangle& t = triangle(r);
      const int i = t.index_of_vertex(p);
      if (!t.alive || i < 0) continue;
      const TriangleRef ur = t.nbr[i];
      if (ur == kNoTriangle) continue;
      const VertexId d = triangle(ur).v[mirror_index(r, i)];
      if (incircle(t.v[i], t.v[next3(i)], t.v[prev3(i)], d) != Sign::Negative) continue;
      flip22({r, i});
      // The flip leaves (p, a, d) in r and (d, b, p) in ur.
      stack.push_back(ur);
      stack.push_back(r);
    }
  }

  Location classify(TriangleRef r, const std::array<Sign, 3>& side) const {
    int zeros = 0, last_zero = -1, first_nonzero = -1;
    for (int k = 0; k < 3; ++k) {
      if (side[k] == Sign::Zero) {
        ++zeros;
        last_zero = k;
      } else if (first_nonzero < 0) {
        first_nonzero = k;
      }
    }
    if (zeros == 0) return {r, Containment::Interior, 0};
    if (zeros == 1) return {r, Containment::OnEdge, last_zero};
    return {r, Containment::OnVertex, first_nonzero};
  }

  std::vector<Vertex> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<TriangleRef> free_;
  std::size_t removed_vertices_ = 0;
  std::uint64_t stamp_clock_ = 0;
  TriangleRef last_ = kNoTriangle;
};

}  // namespace meshvor
