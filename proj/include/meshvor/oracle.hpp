#pragma once

// Brute-force references. Everything here is built from the kernel
// predicates alone and shares no triangulation logic with the engine.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "meshvor/errors.hpp"
#include "meshvor/kernel.hpp"
#include "meshvor/simplex_set.hpp"
#include "meshvor/stats.hpp"

namespace meshvor {

namespace detail {

inline bool all_collinear(std::span<const Site> s) {
  for (std::size_t i = 1; i < s.size(); ++i) {
    for (std::size_t k = i + 1; k < s.size(); ++k) {
      if (orient2d(s[0].p, s[i].p, s[k].p) != Sign::Zero) return false;
    }
  }
  return true;
}

/// Empty-orthoball enumeration over all triples, O(n^4).
inline SimplexSet brute_regular(std::span<const Site> s, const ExactScalar& t) {
  SimplexSet out;
  const std::size_t n = s.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        const Sign o = orient2d(s[i].p, s[j].p, s[k].p);
        if (o == Sign::Zero) continue;
        const Site& a = s[i];
        const Site& b = o == Sign::Positive ? s[j] : s[k];
        const Site& c = o == Sign::Positive ? s[k] : s[j];
        bool empty = true;
        for (std::size_t m = 0; m < n && empty; ++m) {
          if (m == i || m == j || m == k) continue;
          empty = incircle_perturbed(a, b, c, s[m], t) == Sign::Positive;
        }
        if (empty) {
          out.triangles.push_back(SimplexSet::make_triangle(static_cast<std::uint32_t>(a.id),
                                                            static_cast<std::uint32_t>(b.id),
                                                            static_cast<std::uint32_t>(c.id)));
        }
      }
    }
  }
  out.close();
  return out;
}

}  // namespace detail

/// Delaunay complex of distinct sites labeled (and perturbed) by their ids.
inline SimplexSet brute_delaunay(std::span<const Site> sites) {
  if (sites.size() < 2) throw PreconditionError("brute_delaunay: need at least two points");
  if (detail::all_collinear(sites)) {
    std::vector<Site> line(sites.begin(), sites.end());
    std::sort(line.begin(), line.end(), [](const Site& a, const Site& b) {
      return a.p.x != b.p.x ? a.p.x < b.p.x : a.p.y < b.p.y;
    });
    SimplexSet out;
    for (std::size_t i = 0; i + 1 < line.size(); ++i) {
      if (line[i].p == line[i + 1].p) throw DegenerateError("brute_delaunay: duplicate point");
      out.edges.push_back(SimplexSet::make_edge(static_cast<std::uint32_t>(line[i].id),
                                                static_cast<std::uint32_t>(line[i + 1].id)));
    }
    out.close();
    return out;
  }
  return detail::brute_regular(sites, ExactScalar(0));
}

/// Delaunay complex of points labeled by their index.
inline SimplexSet brute_delaunay(std::span<const Point> points) {
  std::vector<Site> sites;
  sites.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) sites.push_back({points[i], WeightClass::Input, i});
  return brute_delaunay(std::span<const Site>(sites));
}

/// Weighted Delaunay complex of labeled sites at time t: every ccw triple
/// whose time-t orthoball no other site encroaches, with all faces.
inline SimplexSet brute_weighted_delaunay(std::span<const Site> sites, const ExactScalar& t) {
  if (sites.size() < 3) throw PreconditionError("brute_weighted_delaunay: need at least three points");
  if (sgn(t) < 0) throw PreconditionError("brute_weighted_delaunay: negative time");
  return detail::brute_regular(sites, t);
}

/// Ratio of the largest to the smallest pairwise distance.
inline double spread(std::span<const Point> p) {
  if (p.size() < 2) throw PreconditionError("spread: need at least two points");
  double dmin = std::numeric_limits<double>::infinity(), dmax = 0.0;
  auto d2 = [&](std::size_t i, std::size_t j) {
    const double dx = p[i].x - p[j].x, dy = p[i].y - p[j].y;
    return dx * dx + dy * dy;
  };
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      if (p[i] == p[j]) throw DegenerateError("spread: duplicate point");
      const double d = d2(i, j);
      dmin = std::min(dmin, d);
      dmax = std::max(dmax, d);
    }
  }
  // Re-evaluate the extreme candidates exactly.
  auto exact = [&](std::size_t i, std::size_t j) {
    const mpq_class dx = mpq_class(p[i].x) - mpq_class(p[j].x), dy = mpq_class(p[i].y) - mpq_class(p[j].y);
    return mpq_class(dx * dx + dy * dy);
  };
  mpq_class qmin, qmax;
  bool have_min = false, have_max = false;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      const double d = d2(i, j);
      if (d <= dmin * (1 + 1e-9) || dmin < 1e-290) {
        const mpq_class q = exact(i, j);
        if (!have_min || q < qmin) qmin = q;
        have_min = true;
      }
      if (d >= dmax * (1 - 1e-9)) {
        const mpq_class q = exact(i, j);
        if (!have_max || q > qmax) qmax = q;
        have_max = true;
      }
    }
  }
  return std::sqrt(mpq_class(qmax / qmin).get_d());
}

/// Number of faces of the dual Voronoi diagram: one per simplex.
inline std::uint64_t face_count(const SimplexSet& s) { return s.size(); }

inline SimplexDiff verify_equal(const SimplexSet& actual, const SimplexSet& expected) {
  return diff(actual, expected);
}

/// Empirical forms of the flip and size bounds.
struct BoundReport {
  std::uint64_t n = 0;
  std::uint64_t f = 0;
  double spread = 0.0;
  std::uint64_t steiner_count = 0;
  std::uint64_t flips = 0;
  std::uint64_t potential_flips = 0;
  double ratio_flip = 0.0;
  double ratio_potential = 0.0;
  double ratio_size = 0.0;
  double wall_time = 0.0;

  friend bool operator==(const BoundReport&, const BoundReport&) = default;
};

/// log2(spread + 2), the log factor used by every bound ratio.
inline double log_spread(double spread) { return std::log2(spread + 2.0); }

inline BoundReport bound_report(const RunStats& s, double wall_time = 0.0) {
  BoundReport r;
  r.n = s.n;
  r.f = s.f;
  r.spread = s.spread;
  r.steiner_count = s.steiner_count;
  r.flips = s.flips();
  r.potential_flips = s.potential_flips_seen;
  const double lg = log_spread(s.spread);
  if (s.f > 0) {
    r.ratio_flip = static_cast<double>(r.flips) / (static_cast<double>(s.f) * lg);
    r.ratio_potential = static_cast<double>(r.potential_flips) / (static_cast<double>(s.f) * lg);
  }
  if (s.n > 0) r.ratio_size = static_cast<double>(s.steiner_count) / (static_cast<double>(s.n) * lg);
  r.wall_time = wall_time;
  return r;
}

/// Result of comparing a mesh complex against Del_P relabeled into mesh ids.
struct InducedReport {
  SimplexSet missing;     // simplices of Del_P absent from the mesh
  SimplexSet extra_input; // input-only simplices of the mesh outside Del_P
  bool ok() const { return missing.empty() && extra_input.empty(); }
};

/// Checks that `del_p` (in mesh vertex labels) is an induced subcomplex of
/// `mesh`, where is_input[label] marks the input vertices.
inline InducedReport check_induced_subcomplex(const SimplexSet& mesh, const SimplexSet& del_p,
                                              const std::vector<bool>& is_input) {
  auto input_only = [&](std::span<const std::uint32_t> labels) {
    return std::all_of(labels.begin(), labels.end(), [&](std::uint32_t v) { return v < is_input.size() && is_input[v]; });
  };
  SimplexSet restricted;
  for (const auto v : mesh.vertices) {
    if (input_only(std::span<const std::uint32_t>(&v, 1))) restricted.vertices.push_back(v);
  }
  for (const auto& e : mesh.edges) {
    if (input_only(e)) restricted.edges.push_back(e);
  }
  for (const auto& t : mesh.triangles) {
    if (input_only(t)) restricted.triangles.push_back(t);
  }
  const SimplexDiff d = diff(restricted, del_p);
  return {d.missing, d.extra};
}

}  // namespace meshvor
