#pragma once

// JSON result document: config, the output complex and run statistics.
// Keys are written in a fixed order so equal results give equal bytes.

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "meshvor/errors.hpp"
#include "meshvor/pipeline.hpp"

namespace meshvor {

inline constexpr const char* kDocumentVersion = "meshvor-result/1";

struct DocumentConfig {
  double tau = 3.0;
  double box_scale = 3.0;
  std::uint64_t max_points = 1'000'000;
  std::optional<std::uint64_t> seed;  // set when the input came from a generator

  friend bool operator==(const DocumentConfig&, const DocumentConfig&) = default;
};

struct ResultDocument {
  std::string version = kDocumentVersion;
  DocumentConfig config;
  std::vector<Point> vertices;  // vertex i is input point i
  SimplexSet complex;
  RunStats stats;
  BoundReport report;
  std::optional<MeshSnapshot> mesh;

  friend bool operator==(const ResultDocument&, const ResultDocument&) = default;
};

class DocumentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline ResultDocument make_document(const PipelineResult& r, const PipelineConfig& cfg,
                                    std::optional<std::uint64_t> seed = std::nullopt) {
  ResultDocument d;
  d.config = {cfg.mesher.tau, cfg.mesher.box_scale, cfg.mesher.max_points, seed};
  d.vertices = r.input;
  d.complex = r.complex;
  d.stats = r.stats;
  d.report = r.report;
  d.mesh = r.mesh;
  return d;
}

namespace detail {

using ojson = nlohmann::ordered_json;

inline WeightClass parse_kind(const std::string& s) {
  if (s == "input") return WeightClass::Input;
  if (s == "steiner") return WeightClass::Steiner;
  if (s == "box") return WeightClass::Box;
  throw DocumentError("unknown vertex kind '" + s + "'");
}

template <class T>
T get(const ojson& j, const char* key) {
  if (!j.contains(key)) throw DocumentError(std::string("missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw DocumentError(std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const ResultDocument& d) {
  using detail::ojson;
  ojson j;
  j["version"] = d.version;
  ojson cfg;
  cfg["tau"] = d.config.tau;
  cfg["box_scale"] = d.config.box_scale;
  cfg["max_points"] = d.config.max_points;
  cfg["seed"] = d.config.seed ? ojson(*d.config.seed) : ojson(nullptr);
  j["config"] = cfg;

  ojson verts = ojson::array();
  for (std::size_t i = 0; i < d.vertices.size(); ++i) {
    verts.push_back({{"id", i}, {"x", d.vertices[i].x}, {"y", d.vertices[i].y}, {"kind", "input"}});
  }
  j["vertices"] = verts;
  j["edges"] = d.complex.edges;
  j["triangles"] = d.complex.triangles;

  const RunStats& s = d.stats;
  const BoundReport& r = d.report;
  j["stats"] = {{"n", r.n},
                {"f", r.f},
                {"spread", r.spread},
                {"steiner_count", r.steiner_count},
                {"flips", r.flips},
                {"potential_flips", r.potential_flips},
                {"ratio_flip", r.ratio_flip},
                {"ratio_potential", r.ratio_potential},
                {"ratio_size", r.ratio_size},
                {"wall_time", r.wall_time},
                {"flips_22", s.flips_22},
                {"flips_31", s.flips_31},
                {"mesh_size", s.mesh_size},
                {"scaffolding_count", s.scaffolding_count},
                {"stale_pops", s.stale_pops},
                {"degenerate_pops", s.degenerate_pops},
                {"late_certificates", s.late_certificates},
                {"events_scheduled", s.events_scheduled},
                {"heap_peak", s.heap_peak}};

  if (d.mesh) {
    ojson mv = ojson::array();
    for (const Site& v : d.mesh->vertices) {
      mv.push_back({{"id", v.id}, {"x", v.p.x}, {"y", v.p.y}, {"kind", to_string(v.kind)}});
    }
    j["mesh"] = {{"vertices", mv}, {"triangles", d.mesh->triangles}};
  }
  return j;
}

inline ResultDocument from_json(const nlohmann::ordered_json& j) {
  using detail::get;
  using detail::ojson;
  if (!j.is_object()) throw DocumentError("document is not a JSON object");
  ResultDocument d;
  d.version = get<std::string>(j, "version");
  if (d.version != kDocumentVersion) throw DocumentError("unsupported document version '" + d.version + "'");

  const ojson& cfg = j.at("config");
  d.config.tau = get<double>(cfg, "tau");
  d.config.box_scale = get<double>(cfg, "box_scale");
  d.config.max_points = get<std::uint64_t>(cfg, "max_points");
  if (cfg.contains("seed") && !cfg.at("seed").is_null()) d.config.seed = get<std::uint64_t>(cfg, "seed");

  for (const ojson& v : j.at("vertices")) {
    if (get<std::size_t>(v, "id") != d.vertices.size()) throw DocumentError("vertex ids must be 0, 1, 2, ...");
    d.vertices.push_back({get<double>(v, "x"), get<double>(v, "y")});
  }
  d.complex.edges = get<std::vector<SimplexSet::Edge>>(j, "edges");
  d.complex.triangles = get<std::vector<SimplexSet::Tri>>(j, "triangles");
  for (std::uint32_t i = 0; i < d.vertices.size(); ++i) d.complex.vertices.push_back(i);
  for (const auto& e : d.complex.edges) {
    if (e[0] >= d.vertices.size() || e[1] >= d.vertices.size()) throw DocumentError("edge references a missing vertex");
  }
  for (const auto& t : d.complex.triangles) {
    for (const auto v : t) {
      if (v >= d.vertices.size()) throw DocumentError("triangle references a missing vertex");
    }
  }

  const ojson& s = j.at("stats");
  BoundReport& r = d.report;
  r.n = get<std::uint64_t>(s, "n");
  r.f = get<std::uint64_t>(s, "f");
  r.spread = get<double>(s, "spread");
  r.steiner_count = get<std::uint64_t>(s, "steiner_count");
  r.flips = get<std::uint64_t>(s, "flips");
  r.potential_flips = get<std::uint64_t>(s, "potential_flips");
  r.ratio_flip = get<double>(s, "ratio_flip");
  r.ratio_potential = get<double>(s, "ratio_potential");
  r.ratio_size = get<double>(s, "ratio_size");
  r.wall_time = get<double>(s, "wall_time");
  RunStats& st = d.stats;
  st.n = r.n;
  st.f = r.f;
  st.spread = r.spread;
  st.steiner_count = r.steiner_count;
  st.potential_flips_seen = r.potential_flips;
  st.flips_22 = get<std::uint64_t>(s, "flips_22");
  st.flips_31 = get<std::uint64_t>(s, "flips_31");
  st.mesh_size = get<std::uint64_t>(s, "mesh_size");
  st.scaffolding_count = get<std::uint64_t>(s, "scaffolding_count");
  st.stale_pops = get<std::uint64_t>(s, "stale_pops");
  st.degenerate_pops = get<std::uint64_t>(s, "degenerate_pops");
  st.late_certificates = get<std::uint64_t>(s, "late_certificates");
  st.events_scheduled = get<std::uint64_t>(s, "events_scheduled");
  st.heap_peak = get<std::uint64_t>(s, "heap_peak");
  if (st.flips() != r.flips) throw DocumentError("flips != flips_22 + flips_31");

  if (j.contains("mesh")) {
    MeshSnapshot m;
    for (const ojson& v : j.at("mesh").at("vertices")) {
      m.vertices.push_back({{get<double>(v, "x"), get<double>(v, "y")},
                            detail::parse_kind(get<std::string>(v, "kind")),
                            get<std::uint64_t>(v, "id")});
    }
    m.triangles = get<std::vector<SimplexSet::Tri>>(j.at("mesh"), "triangles");
    d.mesh = std::move(m);
  }
  return d;
}

/// Exact rational as "numerator/denominator", denominator 1 included.
inline std::string fraction_string(const ExactScalar& v) {
  ExactScalar c(v);
  c.canonicalize();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

/// One line of the event trace (JSON lines).
inline std::string trace_line(const TraceRecord& r) {
  nlohmann::ordered_json j;
  j["time"] = fraction_string(r.time);
  j["kind"] = to_string(r.kind);
  if (r.kind == StepOutcome::PerformedFlip31) {
    j["removed"] = r.vertices[0];
    j["vertices"] = {r.vertices[1], r.vertices[2], r.vertices[3]};
  } else {
    j["vertices"] = r.vertices;
  }
  return j.dump();
}

inline std::string dump_document(const ResultDocument& d) { return to_json(d).dump(2) + "\n"; }

inline ResultDocument parse_document(const std::string& text) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DocumentError(std::string("invalid JSON: ") + e.what());
  }
  try {
    return from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw DocumentError(std::string("malformed document: ") + e.what());
  }
}

}  // namespace meshvor
