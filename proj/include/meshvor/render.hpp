#pragma once

// SVG rendering of a result document, optionally with the Voronoi diagram
// (the dual of the complex) drawn over it.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "meshvor/document.hpp"
#include "meshvor/pointfile.hpp"

namespace meshvor {

struct RenderOptions {
  bool voronoi = false;
  bool mesh = false;  // draw the mesh snapshot if the document has one
  double margin = 0.1;  // fraction of the larger extent
};

struct ViewBox {
  double x0, y0, x1, y1;
};

namespace detail {

inline ViewBox view_of(const std::vector<Point>& pts, double margin) {
  double x0 = pts.front().x, x1 = x0, y0 = pts.front().y, y1 = y0;
  for (const Point& p : pts) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  double ext = std::max(x1 - x0, y1 - y0);
  if (ext == 0) ext = 1;
  const double m = ext * margin;
  return {x0 - m, y0 - m, x1 + m, y1 + m};
}

// Liang-Barsky: clip o + s*d, s in [lo, hi], to the view.
inline std::optional<std::pair<Point, Point>> clip(Point o, Point d, double lo, double hi, const ViewBox& v) {
  const double p[4] = {-d.x, d.x, -d.y, d.y};
  const double q[4] = {o.x - v.x0, v.x1 - o.x, o.y - v.y0, v.y1 - o.y};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0) {
      if (q[i] < 0) return std::nullopt;
      continue;
    }
    const double r = q[i] / p[i];
    if (p[i] < 0) lo = std::max(lo, r);
    else hi = std::min(hi, r);
  }
  if (lo > hi || !std::isfinite(lo) || !std::isfinite(hi)) return std::nullopt;
  return std::pair{Point{o.x + lo * d.x, o.y + lo * d.y}, Point{o.x + hi * d.x, o.y + hi * d.y}};
}

inline Point center_of(Point a, Point b, Point c) {
  const Ball b0 = circumball(a, b, c);
  return {b0.cx.get_d(), b0.cy.get_d()};
}

class SvgWriter {
 public:
  explicit SvgWriter(const ViewBox& v) : v_(v) {}

  std::string n(double x) const { return format_coordinate(x); }
  // y grows downwards in SVG
  std::string fy(double y) const { return format_coordinate(v_.y0 + v_.y1 - y); }

  void line(Point a, Point b, const char* cls) {
    out_ << "  <line class=\"" << cls << "\" x1=\"" << n(a.x) << "\" y1=\"" << fy(a.y) << "\" x2=\"" << n(b.x)
         << "\" y2=\"" << fy(b.y) << "\"/>\n";
  }
  void polygon(const std::vector<Point>& ps, const char* cls) {
    out_ << "  <polygon class=\"" << cls << "\" points=\"";
    for (std::size_t i = 0; i < ps.size(); ++i) out_ << (i ? " " : "") << n(ps[i].x) << ',' << fy(ps[i].y);
    out_ << "\"/>\n";
  }
  void circle(Point c, double r, const std::string& cls, std::optional<std::size_t> id = std::nullopt) {
    out_ << "  <circle class=\"" << cls << "\"";
    if (id) out_ << " data-id=\"" << *id << "\"";
    out_ << " cx=\"" << n(c.x) << "\" cy=\"" << fy(c.y) << "\" r=\"" << n(r) << "\"/>\n";
  }
  void raw(const std::string& s) { out_ << s; }
  std::string str() const { return out_.str(); }

 private:
  ViewBox v_;
  std::ostringstream out_;
};

}  // namespace detail

inline std::string render_svg(const ResultDocument& d, const RenderOptions& opt = {}) {
  if (d.vertices.empty()) throw PreconditionError("render: document has no vertices");
  std::vector<Point> frame = d.vertices;
  if (opt.mesh && d.mesh) {
    for (const Site& s : d.mesh->vertices) frame.push_back(s.p);
  }
  const ViewBox v = detail::view_of(frame, opt.margin);
  const double w = v.x1 - v.x0, h = v.y1 - v.y0;
  const double stroke = std::max(w, h) / 500;
  detail::SvgWriter svg(v);

  std::ostringstream head;
  head << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"" << svg.n(v.x0) << ' ' << svg.n(v.y0)
       << ' ' << svg.n(w) << ' ' << svg.n(h) << "\">\n"
       << "  <style>\n"
       << "    .triangle { fill: #dde8f4; stroke: none; }\n"
       << "    .edge { stroke: #24476b; stroke-width: " << svg.n(stroke) << "; }\n"
       << "    .mesh { fill: none; stroke: #b0b0b0; stroke-width: " << svg.n(stroke / 2) << "; }\n"
       << "    .voronoi { stroke: #c0392b; stroke-width: " << svg.n(stroke) << "; }\n"
       << "    .vertex.input { fill: #111; }\n"
       << "    .vertex.steiner { fill: #999; }\n"
       << "    .vertex.box { fill: #999; }\n"
       << "    .circumcenter { fill: #c0392b; }\n"
       << "  </style>\n";
  svg.raw(head.str());

  const auto& P = d.vertices;
  if (opt.mesh && d.mesh) {
    std::map<std::uint64_t, Point> at;
    for (const Site& s : d.mesh->vertices) at[s.id] = s.p;
    for (const auto& t : d.mesh->triangles) svg.polygon({at.at(t[0]), at.at(t[1]), at.at(t[2])}, "mesh");
  }
  for (const auto& t : d.complex.triangles) svg.polygon({P[t[0]], P[t[1]], P[t[2]]}, "triangle");
  for (const auto& e : d.complex.edges) svg.line(P[e[0]], P[e[1]], "edge");

  if (opt.voronoi) {
    // Triangles on each side of every edge.
    std::map<SimplexSet::Edge, std::vector<std::size_t>> side;
    std::vector<Point> cc;
    for (std::size_t i = 0; i < d.complex.triangles.size(); ++i) {
      const auto& t = d.complex.triangles[i];
      cc.push_back(detail::center_of(P[t[0]], P[t[1]], P[t[2]]));
      for (int k = 0; k < 3; ++k) side[SimplexSet::make_edge(t[k], t[(k + 1) % 3])].push_back(i);
    }
    for (const auto& e : d.complex.edges) {
      const Point a = P[e[0]], b = P[e[1]];
      const Point normal{-(b.y - a.y), b.x - a.x};
      const auto it = side.find(e);
      const std::size_t k = it == side.end() ? 0 : it->second.size();
      std::optional<std::pair<Point, Point>> seg;
      if (k == 2) {
        seg = detail::clip(cc[it->second[0]], {cc[it->second[1]].x - cc[it->second[0]].x,
                                               cc[it->second[1]].y - cc[it->second[0]].y},
                           0, 1, v);
      } else if (k == 1) {
        // Ray away from the triangle's third vertex.
        const auto& t = d.complex.triangles[it->second[0]];
        std::uint32_t o = t[0];
        for (const auto x : t) {
          if (x != e[0] && x != e[1]) o = x;
        }
        const double side_of_o = normal.x * (P[o].x - a.x) + normal.y * (P[o].y - a.y);
        const Point dir = side_of_o > 0 ? Point{-normal.x, -normal.y} : normal;
        seg = detail::clip(cc[it->second[0]], dir, 0, INFINITY, v);
      } else {
        const Point mid{(a.x + b.x) / 2, (a.y + b.y) / 2};
        seg = detail::clip(mid, normal, -INFINITY, INFINITY, v);
      }
      if (seg) svg.line(seg->first, seg->second, "voronoi");
    }
    for (const Point c : cc) svg.circle(c, stroke * 1.5, "circumcenter");
  }

  if (opt.mesh && d.mesh) {
    for (const Site& s : d.mesh->vertices) {
      if (s.kind != WeightClass::Input) svg.circle(s.p, stroke * 1.5, std::string("vertex ") + to_string(s.kind));
    }
  }
  for (std::size_t i = 0; i < P.size(); ++i) svg.circle(P[i], stroke * 2.5, "vertex input", i);
  svg.raw("</svg>\n");
  return svg.str();
}

}  // namespace meshvor
