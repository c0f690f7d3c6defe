#pragma once

// Oracle-free check of a claimed Delaunay complex for inputs too large for
// the brute-force oracle: exact counts against the convex hull, orientation
// and edge manifoldness, local Delaunayness of every interior edge, and an
// empty-circle test of a sample of triangles against all points.

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "meshvor/kernel.hpp"
#include "meshvor/simplex_set.hpp"

namespace meshvor {

struct SampledReport {
  std::vector<std::string> problems;
  std::size_t hull_vertices = 0;
  std::size_t sampled_triangles = 0;
  bool ok() const { return problems.empty(); }
};

/// Number of input points on the convex hull boundary, counting points in
/// the relative interior of hull edges. Returns n when all points are
/// collinear.
inline std::size_t hull_boundary_count(std::span<const Point> pts) {
  std::vector<Point> p(pts.begin(), pts.end());
  std::sort(p.begin(), p.end(), [](Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  if (p.size() < 3) return p.size();
  // Monotone chain that keeps collinear boundary points.
  std::vector<Point> h;
  auto chain = [&](auto first, auto last) {
    const std::size_t base = h.size();
    for (auto it = first; it != last; ++it) {
      while (h.size() >= base + 2 && orient2d(h[h.size() - 2], h.back(), *it) == Sign::Negative) h.pop_back();
      h.push_back(*it);
    }
    h.pop_back();
  };
  chain(p.begin(), p.end());
  chain(p.rbegin(), p.rend());
  // Collinear input walks out and back, visiting interior points twice.
  bool flat = true;
  for (std::size_t i = 2; i < p.size() && flat; ++i) flat = orient2d(p[0], p[1], p[i]) == Sign::Zero;
  return flat ? p.size() : h.size();
}

inline SampledReport sampled_check(std::span<const Point> pts, const SimplexSet& s, std::size_t samples = 256,
                                   std::uint64_t seed = 0) {
  SampledReport r;
  const std::size_t n = pts.size();
  auto fail = [&](std::string m) {
    if (r.problems.size() < 20) r.problems.push_back(std::move(m));
  };
  std::vector<std::uint32_t> ids(n);
  for (std::uint32_t i = 0; i < n; ++i) ids[i] = i;
  if (s.vertices != ids) fail("vertex set is not 0.." + std::to_string(n == 0 ? 0 : n - 1));
  for (const auto& e : s.edges) {
    if (e[0] >= n || e[1] >= n || e[0] >= e[1]) {
      fail("malformed edge");
      return r;
    }
  }
  for (const auto& t : s.triangles) {
    if (t[0] >= n || t[1] >= n || t[2] >= n) {
      fail("malformed triangle");
      return r;
    }
  }
  const std::size_t h = hull_boundary_count(pts);
  r.hull_vertices = h;

  bool flat = true;
  for (std::size_t i = 2; i < n && flat; ++i) flat = orient2d(pts[0], pts[1], pts[i]) == Sign::Zero;
  if (flat) {
    // Delaunay complex of collinear points is the path in sorted order.
    if (!s.triangles.empty()) fail("collinear input has triangles");
    std::vector<std::uint32_t> order = ids;
    std::sort(order.begin(), order.end(), [&](std::uint32_t i, std::uint32_t j) {
      return pts[i].x < pts[j].x || (pts[i].x == pts[j].x && pts[i].y < pts[j].y);
    });
    std::vector<SimplexSet::Edge> path;
    for (std::size_t i = 0; i + 1 < order.size(); ++i) path.push_back(SimplexSet::make_edge(order[i], order[i + 1]));
    std::sort(path.begin(), path.end());
    if (path != s.edges) fail("edges are not the sorted path through collinear input");
    return r;
  }

  const std::size_t want_t = 2 * n - 2 - h, want_e = 3 * n - 3 - h;
  if (s.triangles.size() != want_t) {
    fail("triangle count " + std::to_string(s.triangles.size()) + ", expected " + std::to_string(want_t));
  }
  if (s.edges.size() != want_e) {
    fail("edge count " + std::to_string(s.edges.size()) + ", expected " + std::to_string(want_e));
  }

  // Edge -> opposite vertices, split by side: [0] left of (lo, hi), [1] right.
  std::map<SimplexSet::Edge, std::array<std::int64_t, 2>> opp;
  for (const auto& e : s.edges) opp[e] = {-1, -1};
  for (const auto& t : s.triangles) {
    if (orient2d(pts[t[0]], pts[t[1]], pts[t[2]]) != Sign::Positive) {
      fail("triangle " + std::to_string(t[0]) + " " + std::to_string(t[1]) + " " + std::to_string(t[2]) +
           " is not counterclockwise");
      continue;
    }
    for (int k = 0; k < 3; ++k) {
      const std::uint32_t u = t[k], v = t[(k + 1) % 3], w = t[(k + 2) % 3];
      const auto it = opp.find(SimplexSet::make_edge(u, v));
      if (it == opp.end()) {
        fail("triangle edge missing from the edge list");
        continue;
      }
      std::int64_t& slot = it->second[u < v ? 0 : 1];
      if (slot != -1) fail("edge " + std::to_string(it->first[0]) + " " + std::to_string(it->first[1]) +
                           " has two triangles on one side");
      slot = w;
    }
  }
  auto inside = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d) {
    static const ExactScalar zero(0);
    return incircle_at({pts[a]}, {pts[b]}, {pts[c]}, {pts[d]}, zero) == Sign::Negative;
  };
  for (const auto& [e, o] : opp) {
    if (o[0] < 0 && o[1] < 0) {
      fail("edge " + std::to_string(e[0]) + " " + std::to_string(e[1]) + " belongs to no triangle");
      continue;
    }
    if (o[0] >= 0 && o[1] >= 0 && inside(e[0], e[1], static_cast<std::uint32_t>(o[0]), static_cast<std::uint32_t>(o[1]))) {
      fail("edge " + std::to_string(e[0]) + " " + std::to_string(e[1]) + " is not locally Delaunay");
    }
  }

  std::vector<std::size_t> pick(s.triangles.size());
  for (std::size_t i = 0; i < pick.size(); ++i) pick[i] = i;
  if (pick.size() > samples) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < samples; ++i) std::swap(pick[i], pick[i + rng() % (pick.size() - i)]);
    pick.resize(samples);
    std::sort(pick.begin(), pick.end());
  }
  for (const std::size_t i : pick) {
    const auto& t = s.triangles[i];
    if (orient2d(pts[t[0]], pts[t[1]], pts[t[2]]) != Sign::Positive) continue;
    for (std::uint32_t d = 0; d < n; ++d) {
      if (d == t[0] || d == t[1] || d == t[2]) continue;
      if (inside(t[0], t[1], t[2], d)) {
        fail("point " + std::to_string(d) + " lies inside the circumcircle of triangle " + std::to_string(t[0]) +
             " " + std::to_string(t[1]) + " " + std::to_string(t[2]));
        break;
      }
    }
  }
  r.sampled_triangles = pick.size();
  return r;
}

}  // namespace meshvor
