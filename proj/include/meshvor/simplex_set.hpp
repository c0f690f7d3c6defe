#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace meshvor {

/// A face-closed 2D simplicial complex over integer labels, in canonical
/// form: sorted vertex list, edges as (lo, hi), triangles rotated so the
/// smallest label comes first while keeping ccw order.
struct SimplexSet {
  using Edge = std::array<std::uint32_t, 2>;
  using Tri = std::array<std::uint32_t, 3>;

  std::vector<std::uint32_t> vertices;
  std::vector<Edge> edges;
  std::vector<Tri> triangles;

  static Edge make_edge(std::uint32_t a, std::uint32_t b) { return a < b ? Edge{a, b} : Edge{b, a}; }

  /// Rotation of a ccw triple that starts at its smallest label.
  static Tri make_triangle(std::uint32_t a, std::uint32_t b, std::uint32_t c) {
    if (b < a && b < c) return {b, c, a};
    if (c < a && c < b) return {c, a, b};
    return {a, b, c};
  }

  /// Sorts, deduplicates and adds every missing face of the triangles and
  /// edges.
  void close() {
    for (const Tri& t : triangles) {
      edges.push_back(make_edge(t[0], t[1]));
      edges.push_back(make_edge(t[1], t[2]));
      edges.push_back(make_edge(t[2], t[0]));
    }
    for (const Edge& e : edges) {
      vertices.push_back(e[0]);
      vertices.push_back(e[1]);
    }
    sort_unique(vertices);
    sort_unique(edges);
    sort_unique(triangles);
  }

  std::size_t size() const { return vertices.size() + edges.size() + triangles.size(); }
  bool empty() const { return size() == 0; }

  friend bool operator==(const SimplexSet&, const SimplexSet&) = default;

 private:
  template <class T>
  static void sort_unique(std::vector<T>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
};

/// Simplices present in one set but not the other.
struct SimplexDiff {
  SimplexSet missing;  // in expected, absent from actual
  SimplexSet extra;    // in actual, absent from expected

  bool empty() const { return missing.empty() && extra.empty(); }

  std::string describe(std::size_t limit = 10) const {
    std::string out;
    auto emit = [&](const char* tag, const SimplexSet& s) {
      std::size_t shown = 0;
      for (auto v : s.vertices) {
        if (shown++ == limit) return;
        out += std::string(tag) + " vertex " + std::to_string(v) + "\n";
      }
      for (const auto& e : s.edges) {
        if (shown++ == limit) return;
        out += std::string(tag) + " edge " + std::to_string(e[0]) + " " + std::to_string(e[1]) + "\n";
      }
      for (const auto& t : s.triangles) {
        if (shown++ == limit) return;
        out += std::string(tag) + " triangle " + std::to_string(t[0]) + " " + std::to_string(t[1]) + " " +
               std::to_string(t[2]) + "\n";
      }
    };
    emit("missing", missing);
    emit("extra", extra);
    return out;
  }
};

inline SimplexDiff diff(const SimplexSet& actual, const SimplexSet& expected) {
  SimplexDiff d;
  auto split = [](const auto& a, const auto& b, auto& only_a, auto& only_b) {
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(only_a));
    std::set_difference(b.begin(), b.end(), a.begin(), a.end(), std::back_inserter(only_b));
  };
  split(expected.vertices, actual.vertices, d.missing.vertices, d.extra.vertices);
  split(expected.edges, actual.edges, d.missing.edges, d.extra.edges);
  split(expected.triangles, actual.triangles, d.missing.triangles, d.extra.triangles);
  return d;
}

}  // namespace meshvor
