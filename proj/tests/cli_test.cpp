#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "meshvor/document.hpp"
#include "meshvor/pointfile.hpp"

namespace meshvor {
namespace {

namespace fs = std::filesystem;

struct CmdResult {
  int code;
  std::string out;
};

CmdResult run(const std::string& args) {
  const std::string cmd = std::string(MESHVOR_CLI) + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) out.append(buf, n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("meshvor_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
    return path(name);
  }
  static std::string read(const std::string& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path dir_;
};

TEST_F(Cli, GenIsByteIdentical) {
  ASSERT_EQ(run("gen uniform 100 7 -o " + path("a.txt")).code, 0);
  ASSERT_EQ(run("gen uniform 100 7 -o " + path("b.txt")).code, 0);
  EXPECT_EQ(read(path("a.txt")), read(path("b.txt")));
  EXPECT_EQ(run("gen gaussian 10 1").code, 2);
  EXPECT_EQ(run("gen uniform 0 1").code, 2);
}

TEST_F(Cli, GridNineIsThreeByThree) {
  const CmdResult r = run("gen grid 9 0");
  ASSERT_EQ(r.code, 0);
  const auto p = read_points_string(r.out);
  ASSERT_EQ(p.size(), 9u);
  for (std::size_t i = 0; i < 9; ++i) {
    EXPECT_NEAR(p[i].x, static_cast<double>(i % 3) / 3, 1e-8);
    EXPECT_NEAR(p[i].y, static_cast<double>(i / 3) / 3, 1e-8);
  }
}

TEST_F(Cli, TwoScaleSpread) {
  const CmdResult r = run("gen two-scale 10 1");
  ASSERT_EQ(r.code, 0);
  EXPECT_GE(spread(read_points_string(r.out)), 1024.0);
}

TEST_F(Cli, ComputeSmallExamples) {
  const CmdResult two = run("compute " + write("two.txt", "0 0\n1 1\n"));
  ASSERT_EQ(two.code, 0) << two.out;
  const ResultDocument d2 = parse_document(two.out);
  EXPECT_EQ(d2.complex.edges.size(), 1u);
  EXPECT_TRUE(d2.complex.triangles.empty());
  EXPECT_EQ(d2.report.f, 3u);

  const CmdResult three = run("compute --check-invariants " + write("three.txt", "0 0\n1 0.25\n0.375 1\n"));
  ASSERT_EQ(three.code, 0) << three.out;
  const ResultDocument d3 = parse_document(three.out);
  EXPECT_EQ(d3.complex.triangles.size(), 1u);
  EXPECT_EQ(d3.report.f, 7u);
}

TEST_F(Cli, ComputeParseErrors) {
  const CmdResult dup = run("compute " + write("dup.txt", "0 0\n# c\n1 1\n0 0\n"));
  EXPECT_EQ(dup.code, 2);
  EXPECT_NE(dup.out.find("line 4"), std::string::npos) << dup.out;
  const CmdResult bad = run("compute " + write("bad.txt", "0 0\n1 x\n"));
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.out.find("line 2"), std::string::npos) << bad.out;
  EXPECT_EQ(run("compute " + write("empty.txt", "# nothing\n")).code, 2);
  EXPECT_EQ(run("compute " + path("missing.txt")).code, 2);
  EXPECT_EQ(run("compute --tau 1 " + write("one.txt", "0 0\n")).code, 2);
  EXPECT_EQ(run("compute --format pdf " + path("one.txt")).code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("").code, 2);
}

TEST_F(Cli, ComputeMaxPointsIsAFailure) {
  const CmdResult r = run("gen uniform 50 1 -o " + path("p.txt"));
  ASSERT_EQ(r.code, 0);
  const CmdResult c = run("compute --max-points 60 " + path("p.txt"));
  EXPECT_EQ(c.code, 1) << c.out;
}

TEST_F(Cli, TraceHasExactRationalTimes) {
  ASSERT_EQ(run("gen uniform 20 3 -o " + path("p.txt")).code, 0);
  ASSERT_EQ(run("compute --trace " + path("t.jsonl") + " -o " + path("d.json") + " " + path("p.txt")).code, 0);
  std::istringstream lines(read(path("t.jsonl")));
  const ResultDocument d = parse_document(read(path("d.json")));
  std::string line;
  std::size_t count = 0;
  mpq_class last = 0;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    const std::string t = j.at("time");
    ASSERT_NE(t.find('/'), std::string::npos);
    const mpq_class q(t);
    EXPECT_GE(q, last);
    last = q;
    ++count;
  }
  EXPECT_EQ(count, d.report.flips);
}

TEST_F(Cli, VerifyPassFailAndCap) {
  ASSERT_EQ(run("gen clustered 150 2 -o " + path("p.txt")).code, 0);
  const CmdResult ok = run("verify " + path("p.txt"));
  EXPECT_EQ(ok.code, 0) << ok.out;
  const CmdResult bad = run("verify --inject-fault drop-triangle " + path("p.txt"));
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.out.find("missing triangle"), std::string::npos) << bad.out;
  EXPECT_EQ(run("verify --inject-fault extra-edge " + path("p.txt")).code, 1);
  EXPECT_EQ(run("verify " + write("one.txt", "0.5 0.5\n")).code, 0);

  ASSERT_EQ(run("gen uniform 400 2 -o " + path("big.txt")).code, 0);
  EXPECT_EQ(run("verify " + path("big.txt")).code, 2);
  EXPECT_EQ(run("verify --sampled " + path("big.txt")).code, 0);
  EXPECT_EQ(run("verify --sampled --inject-fault drop-edge " + path("big.txt")).code, 1);
}

TEST_F(Cli, VerifyDocument) {
  ASSERT_EQ(run("gen uniform 60 5 -o " + path("p.txt")).code, 0);
  ASSERT_EQ(run("compute -o " + path("d.json") + " " + path("p.txt")).code, 0);
  EXPECT_EQ(run("verify --doc " + path("d.json") + " " + path("p.txt")).code, 0);
  ASSERT_EQ(run("gen uniform 60 6 -o " + path("q.txt")).code, 0);
  EXPECT_EQ(run("verify --doc " + path("d.json") + " " + path("q.txt")).code, 1);
  EXPECT_EQ(run("verify --doc " + write("junk.json", "{") + " " + path("p.txt")).code, 2);
}

TEST_F(Cli, RenderThreePoints) {
  write("three.txt", "0 0\n1 0.25\n0.375 1\n");
  ASSERT_EQ(run("compute -o " + path("d.json") + " " + path("three.txt")).code, 0);
  const CmdResult svg = run("render --voronoi " + path("d.json"));
  ASSERT_EQ(svg.code, 0);
  auto count = [&](const std::string& needle) {
    std::size_t n = 0;
    for (auto p = svg.out.find(needle); p != std::string::npos; p = svg.out.find(needle, p + 1)) ++n;
    return n;
  };
  EXPECT_EQ(count("class=\"vertex input\""), 3u);
  EXPECT_EQ(count("class=\"triangle\""), 1u);
  EXPECT_EQ(count("class=\"voronoi\""), 3u);
  EXPECT_EQ(run("render --voronoi " + path("d.json")).out, svg.out);
  const CmdResult direct = run("compute --format svg " + path("three.txt"));
  EXPECT_EQ(direct.out, run("render " + path("d.json")).out);
}

TEST_F(Cli, BenchDeterministicColumns) {
  const std::string args = "bench --families uniform,grid --sizes 20,40 --seeds 1,2 -j 2 --csv ";
  ASSERT_EQ(run(args + path("a.csv")).code, 0);
  ASSERT_EQ(run(args + path("b.csv")).code, 0);
  auto strip_time = [](const std::string& csv) {
    std::istringstream in(csv);
    std::string line, out;
    while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
    return out;
  };
  const std::string a = strip_time(read(path("a.csv")));
  EXPECT_EQ(a, strip_time(read(path("b.csv"))));
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 9);
  EXPECT_EQ(a.rfind("family,n,seed,", 0), 0u);
  EXPECT_NE(a.find("\nuniform,20,1,"), std::string::npos);
  EXPECT_LT(a.find("uniform,40,2"), a.find("grid,20,1"));
}

}  // namespace
}  // namespace meshvor
