#include <doctest.h>

#include "emsp/bench.hpp"
#include "emsp/instances.hpp"
#include "support.hpp"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

namespace fs = std::filesystem;
using emsp::BenchRecord;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("emsp_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::vector<std::string> write_instances(const TempDir& dir, int count, int n) {
  for (int k = 0; k < count; ++k) {
    emsp::GeneratorSpec s;
    s.family = static_cast<emsp::Family>(k % 4);
    s.n = n;
    s.p = 3;
    s.seed = 100 + k;
    emsp::write_file((dir.path / ("inst" + std::to_string(k) + ".emsp")).string(),
                     emsp::serialize_instance(emsp::generate(s)));
  }
  emsp::write_file((dir.path / "notes.txt").string(), "not an instance\n");
  return emsp::list_instances(dir.path.string());
}

BenchRecord rec(const std::string& inst, const std::string& cfg, const std::string& status,
                double t) {
  BenchRecord r;
  r.instance = inst;
  r.config = cfg;
  r.status = status;
  r.wall_time_s = t;
  return r;
}

}  // namespace

TEST_CASE("bench runs every instance and config pair") {
  TempDir dir("bench");
  const auto paths = write_instances(dir, 3, 8);
  REQUIRE(paths.size() == 3);
  CHECK(std::is_sorted(paths.begin(), paths.end()));

  emsp::BenchOptions opts;
  opts.configs = {emsp::parse_config("repeated/none"), emsp::parse_config("forced/root")};
  const auto serial = emsp::run_bench(paths, opts);
  REQUIRE(serial.size() == 6);
  for (std::size_t k = 1; k < serial.size(); ++k) {
    const auto& a = serial[k - 1];
    const auto& b = serial[k];
    CHECK((a.instance < b.instance || (a.instance == b.instance && a.config < b.config)));
  }
  for (const auto& r : serial) {
    CHECK(r.status == "optimal");
    CHECK(r.wall_time_s >= 0);
    CHECK(r.n == 8);
    CHECK(r.seed.has_value());
  }
  // Both configs reach the same optimum on each instance.
  for (std::size_t k = 0; k < serial.size(); k += 2)
    CHECK(testing_support::rel_close(serial[k].value, serial[k + 1].value, 1e-9));

  opts.jobs = 3;
  auto parallel = emsp::run_bench(paths, opts);
  auto strip = [](std::vector<BenchRecord> v) {
    for (auto& r : v) r.wall_time_s = 0;
    return v;
  };
  CHECK(strip(parallel) == strip(serial));

  CHECK_THROWS(emsp::run_bench({(dir.path / "missing.emsp").string()}, opts));
}

TEST_CASE("time-limited runs keep status and bound") {
  TempDir dir("limit");
  emsp::GeneratorSpec s;
  s.family = emsp::Family::blmsdp;
  s.n = 60;
  s.p = 12;
  s.seed = 7;
  const std::string path = (dir.path / "big.emsp").string();
  emsp::write_file(path, emsp::serialize_instance(emsp::generate(s)));
  auto cfg = emsp::parse_config("repeated/none");
  cfg.time_limit_s = 1e-3;
  emsp::BenchOptions opts;
  opts.configs = {cfg};
  const auto recs = emsp::run_bench({path}, opts);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].status == "time_limit");
  CHECK(recs[0].upper_bound >= recs[0].value);
}

TEST_CASE("bench CSV round trip") {
  std::vector<BenchRecord> v;
  BenchRecord a = rec("dir/a.emsp", "repeated_ilp/none", "optimal", 0.125);
  a.family = "cdp";
  a.n = 10;
  a.coords = 2;
  a.value = 1234.5678901234567;
  a.upper_bound = 1234.5678901234567;
  a.iterations = 7;
  a.integer_cuts = 6;
  a.lp_cuts = 0;
  a.seed = 18446744073709551615ULL;
  v.push_back(a);
  BenchRecord b = rec("dir/b.emsp", "forced_cardinality/all", "time_limit", 600);
  b.family = "gdp_v";
  b.upper_bound = 1e300;
  v.push_back(b);
  const std::string csv = emsp::write_bench_csv(v);
  CHECK(csv.rfind("instance,family,n,coords,config,status,value,upper_bound,iterations,"
                  "integer_cuts,lp_cuts,wall_time_s,seed\n",
                  0) == 0);
  CHECK(emsp::read_bench_csv(csv) == v);
  CHECK(emsp::write_bench_csv(emsp::read_bench_csv(csv)) == csv);
  CHECK_THROWS_AS(emsp::read_bench_csv("wrong,header\n"), std::invalid_argument);
}

TEST_CASE("config labels") {
  const auto c = emsp::parse_config("forced/all");
  CHECK(c.algorithm == emsp::Algorithm::forced_cardinality);
  CHECK(c.lp_tangents == emsp::LpTangentMode::all_iterations);
  CHECK(emsp::parse_config("repeated_ilp/root").lp_tangents == emsp::LpTangentMode::root_only);
  CHECK(emsp::parse_config(c.label()).label() == c.label());
  for (const char* bad : {"forced", "fast/none", "repeated/some", ""})
    CHECK_THROWS_AS(emsp::parse_config(bad), std::invalid_argument);
}

TEST_CASE("log grid") {
  const auto g = emsp::log_grid(-1, 2);
  REQUIRE(g.size() == 31);
  CHECK(g.front() == 0.1);
  CHECK(g[10] == 1.0);
  CHECK(g[20] == 10.0);
  CHECK(g.back() == 100.0);
  CHECK(std::is_sorted(g.begin(), g.end()));
  CHECK_THROWS_AS(emsp::log_grid(2, 1), std::invalid_argument);
}

TEST_CASE("performance profiles") {
  const auto grid = emsp::log_grid(-1, 1);
  SUBCASE("all solved at one second") {
    const auto p = emsp::performance_profile(
        {rec("a", "x", "optimal", 1.0), rec("b", "x", "optimal", 1.0)}, grid);
    REQUIRE(p.size() == grid.size());
    for (const auto& pt : p) CHECK(pt.fraction == (pt.t >= 1.0 ? 1.0 : 0.0));
  }
  SUBCASE("unsolved instances never count") {
    const auto p = emsp::performance_profile(
        {rec("a", "x", "optimal", 0.5), rec("b", "x", "time_limit", 0.2)}, grid);
    CHECK(p.back().fraction == 0.5);
  }
  SUBCASE("curves are monotone fractions") {
    testing_support::Gen g(81);
    std::vector<BenchRecord> recs;
    for (int k = 0; k < 40; ++k)
      for (const char* cfg : {"forced_cardinality/none", "repeated_ilp/all"})
        recs.push_back(rec("i" + std::to_string(k), cfg, g.coin(0.8) ? "optimal" : "time_limit",
                           std::pow(10.0, g.real(-1.5, 1.5))));
    const auto p = emsp::performance_profile(recs, grid);
    REQUIRE(p.size() == 2 * grid.size());
    CHECK(p.front().config == "forced_cardinality/none");
    for (std::size_t k = 0; k < p.size(); ++k) {
      CHECK(p[k].fraction >= 0);
      CHECK(p[k].fraction <= 1);
      if (k % grid.size() != 0) CHECK(p[k].fraction >= p[k - 1].fraction);
    }
    const std::string csv = emsp::write_profile_csv(p);
    CHECK(csv.rfind("config,t,fraction\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(p.size() + 1));
  }
}

TEST_CASE("solve report text") {
  const emsp::EmspInstance toy("toy", emsp::PointSetd::from_rows({{0, 0}, {3, 4}, {6, 0}}),
                               {emsp::KnapsackBlock{8, {3, 4, 5}}});
  const emsp::SolverConfig cfg;
  const auto r = emsp::solve(toy, cfg);
  const std::string text = emsp::report_text(toy, cfg, r);
  CHECK(text.find("status=optimal\n") != std::string::npos);
  CHECK(text.find("value=6\n") != std::string::npos);
  CHECK(text.find("config=repeated_ilp/none\n") != std::string::npos);
}
