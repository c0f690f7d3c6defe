// meshvor command-line tool: gen, compute, verify, bench, render.
// Exit codes: 0 ok, 1 verification failure, 2 usage or parse error.

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

#include "meshvor/document.hpp"
#include "meshvor/generators.hpp"
#include "meshvor/pipeline.hpp"
#include "meshvor/pointfile.hpp"
#include "meshvor/render.hpp"
#include "meshvor/sampled_check.hpp"

namespace mv = meshvor;

namespace {

constexpr int kOk = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  if (path == "-") {
    std::ostringstream s;
    s << std::cin.rdbuf();
    return s.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<mv::Point> load_points(const std::string& path) {
  try {
    return mv::read_points_string(slurp(path));
  } catch (const mv::ParseError& e) {
    throw UsageError((path == "-" ? std::string("<stdin>") : path) + ": " + e.what());
  }
}

// Writes to a file, or stdout for "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path != "-") {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw UsageError("cannot write '" + path + "'");
    }
  }
  std::ostream& get() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

struct MesherFlags {
  double tau = 3.0;
  double box_scale = 3.0;
  std::size_t max_points = 1'000'000;

  void add(CLI::App* app) {
    app->add_option("--tau", tau, "aspect-ratio bound of the mesh")->capture_default_str();
    app->add_option("--box-scale", box_scale, "bounding box side over input extent")->capture_default_str();
    app->add_option("--max-points", max_points, "abort when the mesh grows past this")->capture_default_str();
  }
  mv::PipelineConfig config() const {
    mv::PipelineConfig c;
    c.mesher.tau = tau;
    c.mesher.box_scale = box_scale;
    c.mesher.max_points = max_points;
    try {
      c.mesher.check();
    } catch (const mv::PreconditionError& e) {
      throw UsageError(e.what());
    }
    return c;
  }
};

// ---- gen

struct GenArgs {
  std::string family;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  int scale_exponent = 10;
  std::string out = "-";
};

int run_gen(const GenArgs& a) {
  const auto fam = mv::parse_family(a.family);
  if (!fam) throw UsageError("unknown family '" + a.family + "' (uniform, clustered, grid, two-scale)");
  if (a.n < 1) throw UsageError("n must be at least 1");
  mv::GenOptions opt;
  opt.scale_exponent = a.scale_exponent;
  const auto pts = mv::generate(*fam, a.n, a.seed, opt);
  Output out(a.out);
  out.get() << "# " << a.family << " n=" << a.n << " seed=" << a.seed;
  if (*fam == mv::Family::TwoScale) out.get() << " k=" << a.scale_exponent;
  out.get() << '\n';
  mv::write_points(out.get(), pts);
  return kOk;
}

// ---- compute

struct ComputeArgs {
  std::string input;
  MesherFlags mesher;
  std::optional<std::uint64_t> seed;
  std::string trace;
  bool check_invariants = false;
  bool keep_mesh = false;
  bool voronoi = false;
  std::string format = "doc";
  std::string out = "-";
};

int run_compute(const ComputeArgs& a) {
  const auto pts = load_points(a.input);
  if (pts.empty()) throw UsageError("input has no points");
  mv::PipelineConfig cfg = a.mesher.config();
  cfg.check_invariants = a.check_invariants;
  cfg.keep_mesh = a.keep_mesh;
  mv::PipelineHooks hooks;
  std::unique_ptr<Output> trace;
  if (!a.trace.empty()) {
    trace = std::make_unique<Output>(a.trace);
    hooks.trace = [&](const mv::TraceRecord& r) { trace->get() << mv::trace_line(r) << '\n'; };
  }
  const mv::PipelineResult r = mv::compute(pts, cfg, hooks);
  const mv::ResultDocument doc = mv::make_document(r, cfg, a.seed);
  Output out(a.out);
  if (a.format == "svg") {
    mv::RenderOptions ro;
    ro.voronoi = a.voronoi;
    ro.mesh = a.keep_mesh;
    out.get() << mv::render_svg(doc, ro);
  } else {
    out.get() << mv::dump_document(doc);
  }
  return kOk;
}

// ---- verify

struct VerifyArgs {
  std::string input;
  std::string doc;
  MesherFlags mesher;
  bool sampled = false;
  std::size_t samples = 256;
  std::size_t cap = 300;
  std::string inject;
};

void inject_fault(mv::SimplexSet& s, const std::string& kind) {
  if (kind == "drop-triangle" && !s.triangles.empty()) {
    s.triangles.erase(s.triangles.begin() + static_cast<std::ptrdiff_t>(s.triangles.size() / 2));
  } else if (kind == "drop-edge" && !s.edges.empty()) {
    s.edges.erase(s.edges.begin() + static_cast<std::ptrdiff_t>(s.edges.size() / 2));
  } else if (kind == "extra-edge" && s.vertices.size() >= 2) {
    // an edge between the first two vertices not yet joined
    for (std::uint32_t i = 0; i < s.vertices.size(); ++i) {
      for (std::uint32_t j = i + 1; j < s.vertices.size(); ++j) {
        const auto e = mv::SimplexSet::make_edge(i, j);
        if (!std::binary_search(s.edges.begin(), s.edges.end(), e)) {
          s.edges.insert(std::lower_bound(s.edges.begin(), s.edges.end(), e), e);
          return;
        }
      }
    }
  } else if (kind != "drop-triangle" && kind != "drop-edge" && kind != "extra-edge") {
    throw UsageError("unknown fault '" + kind + "'");
  }
}

int run_verify(const VerifyArgs& a) {
  const auto pts = load_points(a.input);
  if (pts.empty()) throw UsageError("input has no points");
  if (pts.size() > a.cap && !a.sampled) {
    throw UsageError(std::to_string(pts.size()) + " points exceed the oracle cap of " + std::to_string(a.cap) +
                     "; pass --sampled for the sampled check");
  }
  mv::SimplexSet got;
  if (!a.doc.empty()) {
    const mv::ResultDocument d = mv::parse_document(slurp(a.doc));
    if (d.vertices != pts) {
      std::cout << "FAIL: document vertices differ from the input points\n";
      return kFail;
    }
    got = d.complex;
  } else {
    got = mv::compute(pts, a.mesher.config()).complex;
  }
  if (!a.inject.empty()) inject_fault(got, a.inject);

  if (pts.size() <= a.cap) {
    const mv::SimplexSet want = pts.size() >= 2 ? mv::brute_delaunay(pts) : got;
    if (pts.size() < 2 && got != mv::SimplexSet{{0}, {}, {}}) {
      std::cout << "FAIL: a single point has only the vertex 0\n";
      return kFail;
    }
    const mv::SimplexDiff d = mv::verify_equal(got, want);
    if (!d.empty()) {
      std::cout << "FAIL: complex differs from the brute-force Delaunay oracle (n = " << pts.size() << ")\n"
                << d.describe(20) << '\n';
      return kFail;
    }
    std::cout << "PASS: matches the brute-force oracle (n = " << pts.size() << ", f = " << mv::face_count(got)
              << ")\n";
    return kOk;
  }
  const mv::SampledReport r = mv::sampled_check(pts, got, a.samples);
  if (!r.ok()) {
    std::cout << "FAIL: sampled check (n = " << pts.size() << ")\n";
    for (const auto& p : r.problems) std::cout << "  " << p << '\n';
    return kFail;
  }
  std::cout << "PASS: sampled check (n = " << pts.size() << ", hull " << r.hull_vertices << ", "
            << r.sampled_triangles << " triangles tested against all points, all edges locally Delaunay)\n";
  return kOk;
}

// ---- bench

struct BenchArgs {
  std::vector<std::string> families{"uniform"};
  std::vector<std::size_t> sizes{128, 256, 512, 1024};
  std::vector<std::uint64_t> seeds{1};
  int scale_exponent = 10;
  MesherFlags mesher;
  unsigned jobs = 0;
  bool check_invariants = false;
  std::string csv;
};

struct BenchRow {
  std::string family;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  mv::RunStats stats;
  mv::BoundReport report;
  std::string error;
};

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

int run_bench(const BenchArgs& a) {
  std::vector<mv::Family> fams;
  for (const auto& f : a.families) {
    const auto p = mv::parse_family(f);
    if (!p) throw UsageError("unknown family '" + f + "'");
    fams.push_back(*p);
  }
  mv::PipelineConfig cfg = a.mesher.config();
  cfg.check_invariants = a.check_invariants;
  mv::GenOptions gopt;
  gopt.scale_exponent = a.scale_exponent;

  std::vector<BenchRow> rows;
  for (const auto f : fams) {
    for (const auto n : a.sizes) {
      for (const auto s : a.seeds) rows.push_back({mv::to_string(f), n, s, {}, {}, {}});
    }
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < rows.size();) {
      BenchRow& row = rows[i];
      try {
        const auto pts = mv::generate(*mv::parse_family(row.family), row.n, row.seed, gopt);
        const mv::PipelineResult r = mv::compute(pts, cfg);
        row.stats = r.stats;
        row.report = r.report;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(a.jobs ? a.jobs : std::thread::hardware_concurrency(),
                                                        static_cast<unsigned>(rows.size())));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  const std::vector<std::string> head{"family",     "n",          "seed",       "mesh",    "steiner",
                                      "f",          "flips",      "potential",  "scaffold", "spread",
                                      "ratio_flip", "ratio_pot",  "ratio_size", "time_s"};
  std::vector<std::vector<std::string>> table{head};
  int status = kOk;
  for (const auto& r : rows) {
    if (!r.error.empty()) {
      std::cerr << "error: " << r.family << " n=" << r.n << " seed=" << r.seed << ": " << r.error << '\n';
      status = kFail;
      continue;
    }
    const auto& s = r.stats;
    const auto& b = r.report;
    table.push_back({r.family, std::to_string(r.n), std::to_string(r.seed), std::to_string(s.mesh_size),
                     std::to_string(s.steiner_count), std::to_string(s.f), std::to_string(b.flips),
                     std::to_string(b.potential_flips), std::to_string(s.scaffolding_count), fixed(s.spread, 1),
                     fixed(b.ratio_flip, 4), fixed(b.ratio_potential, 4), fixed(b.ratio_size, 4),
                     fixed(b.wall_time, 3)});
  }
  std::vector<std::size_t> width(head.size());
  for (const auto& row : table) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  for (const auto& row : table) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) std::cout << "  ";
      if (c == 0) std::cout << std::left << std::setw(static_cast<int>(width[c])) << row[c];
      else std::cout << std::right << std::setw(static_cast<int>(width[c])) << row[c];
    }
    std::cout << '\n';
  }
  if (!a.csv.empty()) {
    Output out(a.csv);
    out.get() << "family,n,seed,mesh_size,steiner_count,f,flips,flips_22,flips_31,potential_flips,"
                 "scaffolding_count,spread,ratio_flip,ratio_potential,ratio_size,wall_time\n";
    for (const auto& r : rows) {
      if (!r.error.empty()) continue;
      const auto& s = r.stats;
      const auto& b = r.report;
      out.get() << r.family << ',' << r.n << ',' << r.seed << ',' << s.mesh_size << ',' << s.steiner_count << ','
                << s.f << ',' << b.flips << ',' << s.flips_22 << ',' << s.flips_31 << ',' << b.potential_flips
                << ',' << s.scaffolding_count << ',' << mv::format_coordinate(s.spread) << ','
                << mv::format_coordinate(b.ratio_flip) << ',' << mv::format_coordinate(b.ratio_potential) << ','
                << mv::format_coordinate(b.ratio_size) << ',' << mv::format_coordinate(b.wall_time) << '\n';
    }
  }
  return status;
}

// ---- render

struct RenderArgs {
  std::string doc;
  bool voronoi = false;
  bool mesh = false;
  std::string out = "-";
};

int run_render(const RenderArgs& a) {
  const mv::ResultDocument d = mv::parse_document(slurp(a.doc));
  mv::RenderOptions ro;
  ro.voronoi = a.voronoi;
  ro.mesh = a.mesh;
  Output out(a.out);
  out.get() << mv::render_svg(d, ro);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delaunay triangulation and Voronoi diagram by mesh refinement and kinetic Steiner-point removal"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "write a seeded benchmark point set");
  g->add_option("family", gen.family, "uniform | clustered | grid | two-scale")->required();
  g->add_option("n", gen.n, "number of points")->required();
  g->add_option("seed", gen.seed, "RNG seed")->capture_default_str();
  g->add_option("--scale-exponent,-k", gen.scale_exponent, "two-scale cluster side is 2^-k/2")->capture_default_str();
  g->add_option("-o,--output", gen.out, "output file")->capture_default_str();

  ComputeArgs comp;
  auto* c = app.add_subcommand("compute", "compute the Delaunay complex of a point file");
  c->add_option("input", comp.input, "point file, - for stdin")->required();
  comp.mesher.add(c);
  c->add_option("--seed", comp.seed, "generator seed to record in the document");
  c->add_option("--trace", comp.trace, "write the flip trace (JSON lines) to FILE");
  c->add_flag("--check-invariants", comp.check_invariants,
              "validate at every event interval and compare against the oracles where small enough");
  c->add_flag("--keep-mesh", comp.keep_mesh, "include the final mesh complex in the output");
  c->add_flag("--voronoi", comp.voronoi, "svg: draw the Voronoi diagram");
  c->add_option("--format", comp.format, "doc or svg")->check(CLI::IsMember({"doc", "svg"}))->capture_default_str();
  c->add_option("-o,--output", comp.out, "output file")->capture_default_str();

  VerifyArgs ver;
  auto* v = app.add_subcommand("verify", "compute and check against the brute-force oracle");
  v->add_option("input", ver.input, "point file, - for stdin")->required();
  ver.mesher.add(v);
  v->add_option("--doc", ver.doc, "check this result document instead of recomputing");
  v->add_flag("--sampled", ver.sampled, "above the cap, run the oracle-free sampled check");
  v->add_option("--samples", ver.samples, "triangles tested against all points")->capture_default_str();
  v->add_option("--cap", ver.cap, "largest n for the brute-force oracle")->capture_default_str();
  v->add_option("--inject-fault", ver.inject)->group("");  // test hook

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "run the pipeline over families, sizes and seeds");
  b->add_option("--families", bench.families, "families to run")->delimiter(',')->capture_default_str();
  b->add_option("--sizes", bench.sizes, "point counts")->delimiter(',')->capture_default_str();
  b->add_option("--seeds", bench.seeds, "seeds")->delimiter(',')->capture_default_str();
  b->add_option("--scale-exponent,-k", bench.scale_exponent, "two-scale exponent")->capture_default_str();
  bench.mesher.add(b);
  b->add_option("-j,--jobs", bench.jobs, "worker threads (0 = all cores)")->capture_default_str();
  b->add_flag("--check-invariants", bench.check_invariants, "run the built-in checks on every instance");
  b->add_option("--csv", bench.csv, "also write machine-readable rows to FILE");

  RenderArgs ren;
  auto* r = app.add_subcommand("render", "draw a result document as SVG");
  r->add_option("document", ren.doc, "result document, - for stdin")->required();
  r->add_flag("--voronoi", ren.voronoi, "draw the Voronoi diagram");
  r->add_flag("--mesh", ren.mesh, "draw the mesh stored with --keep-mesh");
  r->add_option("-o,--output", ren.out, "output file")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (g->parsed()) return run_gen(gen);
    if (c->parsed()) return run_compute(comp);
    if (v->parsed()) return run_verify(ver);
    if (b->parsed()) return run_bench(bench);
    if (r->parsed()) return run_render(ren);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const mv::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kUsage;
  } catch (const mv::DocumentError& e) {
    std::cerr << "document error: " << e.what() << '\n';
    return kUsage;
  } catch (const mv::PreconditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const mv::DegenerateError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const mv::VerificationError& e) {
    std::cerr << "verification failed: " << e.what() << '\n';
    return kFail;
  } catch (const mv::KineticError& e) {
    std::cerr << "verification failed: " << e.what() << '\n';
    return kFail;
  } catch (const std::exception& e) {
    std::cerr << "failed: " << e.what() << '\n';
    return kFail;
  }
  return kUsage;
}
