#pragma once

// preprocess (mesh) -> kinetic removal -> postprocess, with the built-in
// checks and instrumentation.

#include <chrono>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "meshvor/errors.hpp"
#include "meshvor/kinetic.hpp"
#include "meshvor/mesher.hpp"
#include "meshvor/oracle.hpp"

namespace meshvor {

struct PipelineConfig {
  MesherConfig mesher;
  /// validate() at every event interval, weighted-oracle comparison at
  /// interval midpoints while |M| <= kinetic_oracle_cap, and the induced
  /// subcomplex check while n <= oracle_cap.
  bool check_invariants = false;
  bool keep_mesh = false;
  std::size_t oracle_cap = 300;
  std::size_t kinetic_oracle_cap = 60;
};

struct PipelineHooks {
  KineticState::TraceSink trace;
  std::function<void(const MeshResult&)> on_mesh;
  KineticState::IntervalHook on_interval;
  /// After the kinetic loop, before postprocess.
  std::function<void(const KineticState&)> on_kinetic_done;
};

/// The complex M_* before postprocess, labeled by mesh vertex id.
struct MeshSnapshot {
  std::vector<Site> vertices;
  std::vector<SimplexSet::Tri> triangles;

  friend bool operator==(const MeshSnapshot&, const MeshSnapshot&) = default;
};

struct PipelineResult {
  std::vector<Point> input;
  SimplexSet complex;  // Del_P over input indices
  RunStats stats;
  BoundReport report;
  std::size_t boundary_splits = 0;
  std::optional<MeshSnapshot> mesh;
};

namespace detail {

inline void require_valid(const Triangulation& t, const char* when) {
  if (const auto v = t.validate()) {
    throw VerificationError(std::string("validate failed ") + when + ": " + to_string(v->kind) + " at " + v->where);
  }
}

inline std::vector<Site> all_sites(const Triangulation& t) {
  std::vector<Site> s;
  for (std::uint32_t i = 0; i < t.vertex_slots(); ++i) s.push_back(t.site(VertexId{i}));
  return s;
}

}  // namespace detail

/// Del_P of the induced input vertices of a mesh complex, relabeled to mesh
/// ids (input i is vertex 4 + i).
inline SimplexSet to_mesh_labels(const SimplexSet& s, std::uint32_t offset = 4) {
  SimplexSet out;
  for (const auto v : s.vertices) out.vertices.push_back(v + offset);
  for (const auto& e : s.edges) out.edges.push_back({e[0] + offset, e[1] + offset});
  for (const auto& t : s.triangles) out.triangles.push_back({t[0] + offset, t[1] + offset, t[2] + offset});
  return out;
}

inline std::vector<bool> input_mask(const Triangulation& t) {
  std::vector<bool> m(t.vertex_slots());
  for (std::uint32_t i = 0; i < t.vertex_slots(); ++i) m[i] = t.vertex(VertexId{i}).kind == WeightClass::Input;
  return m;
}

inline PipelineResult compute(std::span<const Point> input, const PipelineConfig& cfg = {},
                              const PipelineHooks& hooks = {}) {
  if (input.empty()) throw PreconditionError("compute: empty input");
  const auto start = std::chrono::steady_clock::now();
  PipelineResult out;
  out.input.assign(input.begin(), input.end());

  MeshResult mesh = refine(input, cfg.mesher);
  if (cfg.check_invariants) {
    detail::require_valid(mesh.triangulation, "after meshing");
    if (const auto v = find_badly_spaced(mesh.triangulation, cfg.mesher.tau)) {
      throw VerificationError("mesh vertex " + std::to_string(index_of(*v)) + " exceeds the aspect bound");
    }
  }
  if (hooks.on_mesh) hooks.on_mesh(mesh);
  out.boundary_splits = mesh.boundary_splits;
  const std::size_t mesh_size = mesh.triangulation.live_vertex_count();

  const std::vector<Site> sites = cfg.check_invariants && mesh_size <= cfg.kinetic_oracle_cap
                                      ? detail::all_sites(mesh.triangulation)
                                      : std::vector<Site>{};
  KineticState k(std::move(mesh.triangulation));
  if (hooks.trace) k.set_trace(hooks.trace);
  if (cfg.check_invariants || hooks.on_interval) {
    k.set_interval_hook([&](const KineticState& st, const ExactScalar& lo, const ExactScalar& hi) {
      if (cfg.check_invariants) {
        detail::require_valid(st.triangulation(), "during the kinetic phase");
        if (!sites.empty()) {
          const ExactScalar mid = (lo + hi) / 2;
          const SimplexDiff d = diff(st.triangulation().simplices(), brute_weighted_delaunay(sites, mid));
          if (!d.empty()) {
            throw VerificationError("complex differs from the weighted Delaunay oracle at t = " +
                                    to_exact_string(mid) + "\n" + d.describe());
          }
        }
      }
      if (hooks.on_interval) hooks.on_interval(st, lo, hi);
    });
  }
  k.seed();
  k.run();
  detail::require_valid(k.triangulation(), "after the kinetic phase");
  if (cfg.check_invariants && input.size() >= 2 && input.size() <= cfg.oracle_cap) {
    const InducedReport r = check_induced_subcomplex(k.triangulation().simplices(),
                                                     to_mesh_labels(brute_delaunay(input)), input_mask(k.triangulation()));
    if (!r.ok()) {
      throw VerificationError("input Delaunay complex is not an induced subcomplex of the final mesh\n" +
                              SimplexDiff{r.missing, r.extra_input}.describe());
    }
  }
  if (hooks.on_kinetic_done) hooks.on_kinetic_done(k);
  if (cfg.keep_mesh) {
    MeshSnapshot snap;
    for (const VertexId v : k.triangulation().live_vertices()) snap.vertices.push_back(k.triangulation().site(v));
    snap.triangles = k.triangulation().simplices().triangles;
    out.mesh = std::move(snap);
  }

  out.complex = k.postprocess();
  out.stats = k.stats();
  out.stats.n = input.size();
  out.stats.mesh_size = mesh_size;
  out.stats.steiner_count = mesh.steiner_count;
  out.stats.f = face_count(out.complex);
  out.stats.spread = input.size() >= 2 ? spread(input) : 1.0;
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.report = bound_report(out.stats, wall);
  return out;
}

}  // namespace meshvor
