#include "emsp/bench.hpp"

#include "emsp/instances.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace emsp {

namespace {

std::string fmt(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  out.push_back(std::move(field));
  return out;
}

constexpr const char* kBenchHeader =
    "instance,family,n,coords,config,status,value,upper_bound,iterations,integer_cuts,lp_cuts,"
    "wall_time_s,seed";

}  // namespace

BenchRecord make_record(const std::string& instance, const EmspInstance& inst,
                        const SolverConfig& cfg, const SolveReport& report) {
  BenchRecord r;
  r.instance = instance;
  r.family = inst.family();
  r.n = inst.n();
  r.coords = inst.points() ? static_cast<int>(inst.points()->dimension()) : 0;
  r.config = cfg.label();
  r.status = to_string(report.status);
  r.value = report.best_value;
  r.upper_bound = report.upper_bound;
  r.iterations = report.iterations;
  r.integer_cuts = report.integer_cuts;
  r.lp_cuts = report.lp_cuts;
  r.wall_time_s = std::max(0.0, report.wall_time_s);
  r.seed = inst.seed;
  return r;
}

std::string write_bench_csv(const std::vector<BenchRecord>& records) {
  std::string out = std::string(kBenchHeader) + "\n";
  for (const auto& r : records) {
    out += csv_field(r.instance) + "," + csv_field(r.family) + "," + std::to_string(r.n) + "," +
           std::to_string(r.coords) + "," + csv_field(r.config) + "," + csv_field(r.status) + "," +
           fmt(r.value) + "," + fmt(r.upper_bound) + "," + std::to_string(r.iterations) + "," +
           std::to_string(r.integer_cuts) + "," + std::to_string(r.lp_cuts) + "," +
           fmt(r.wall_time_s) + "," + (r.seed ? std::to_string(*r.seed) : "") + "\n";
  }
  return out;
}

std::vector<BenchRecord> read_bench_csv(std::string_view text) {
  std::vector<BenchRecord> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  auto bad = [&](const std::string& what) {
    return std::invalid_argument("bench csv line " + std::to_string(number) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (number == 1) {
      if (line != kBenchHeader) throw bad("unexpected header");
      continue;
    }
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 13) throw bad("expected 13 fields, found " + std::to_string(f.size()));
    auto num = [&](const std::string& s, auto& v) {
      auto r = std::from_chars(s.data(), s.data() + s.size(), v);
      if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) throw bad("invalid number '" + s + "'");
    };
    BenchRecord r;
    r.instance = f[0];
    r.family = f[1];
    num(f[2], r.n);
    num(f[3], r.coords);
    r.config = f[4];
    r.status = f[5];
    num(f[6], r.value);
    num(f[7], r.upper_bound);
    num(f[8], r.iterations);
    num(f[9], r.integer_cuts);
    num(f[10], r.lp_cuts);
    num(f[11], r.wall_time_s);
    if (!f[12].empty()) {
      std::uint64_t s = 0;
      num(f[12], s);
      r.seed = s;
    }
    out.push_back(std::move(r));
  }
  if (number == 0) throw std::invalid_argument("bench csv is empty");
  return out;
}

SolverConfig parse_config(std::string_view label) {
  const auto slash = label.find('/');
  if (slash == std::string_view::npos)
    throw std::invalid_argument("config '" + std::string(label) + "' must look like algorithm/mode");
  const auto alg = label.substr(0, slash), mode = label.substr(slash + 1);
  SolverConfig cfg;
  if (alg == "repeated" || alg == "repeated_ilp") cfg.algorithm = Algorithm::repeated_ilp;
  else if (alg == "forced" || alg == "forced_cardinality") cfg.algorithm = Algorithm::forced_cardinality;
  else throw std::invalid_argument("unknown algorithm '" + std::string(alg) + "'");
  if (mode == "none") cfg.lp_tangents = LpTangentMode::none;
  else if (mode == "root") cfg.lp_tangents = LpTangentMode::root_only;
  else if (mode == "all") cfg.lp_tangents = LpTangentMode::all_iterations;
  else throw std::invalid_argument("unknown lp tangent mode '" + std::string(mode) + "'");
  return cfg;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot write '" + path + "'");
  out << contents;
  if (!out) throw std::ios_base::failure("write to '" + path + "' failed");
}

std::vector<std::string> list_instances(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw std::ios_base::failure("not a directory: '" + dir + "'");
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".emsp") out.push_back(e.path().string());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<BenchRecord> run_bench(const std::vector<std::string>& paths, const BenchOptions& opts) {
  std::vector<EmspInstance> instances;
  for (const auto& p : paths) instances.push_back(parse_instance(read_file(p)));

  struct Job {
    std::size_t instance;
    std::size_t config;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < instances.size(); ++i)
    for (std::size_t c = 0; c < opts.configs.size(); ++c) jobs.push_back({i, c});

  std::vector<BenchRecord> records(jobs.size());
  std::atomic<std::size_t> cursor{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t k = cursor.fetch_add(1);
      if (k >= jobs.size()) return;
      const auto& inst = instances[jobs[k].instance];
      const auto& cfg = opts.configs[jobs[k].config];
      try {
        SolveReport rep;
        try {
          rep = solve(inst, cfg);
        } catch (const InfeasibleInstance&) {
          rep.status = SolveStatus::infeasible;
        }
        records[k] = make_record(paths[jobs[k].instance], inst, cfg, rep);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int workers = std::max(1, std::min<int>(opts.jobs, static_cast<int>(jobs.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::stable_sort(records.begin(), records.end(), [](const BenchRecord& a, const BenchRecord& b) {
    return std::tie(a.instance, a.config) < std::tie(b.instance, b.config);
  });
  return records;
}

std::string report_text(const EmspInstance& inst, const SolverConfig& cfg, const SolveReport& r) {
  std::string sel;
  for (Index i = 0; i < r.best_solution.size(); ++i)
    if (r.best_solution[i] > 0.5) sel += (sel.empty() ? "" : " ") + std::to_string(i + 1);
  std::string out;
  auto kv = [&](const std::string& k, const std::string& v) { out += k + "=" + v + "\n"; };
  kv("instance", inst.name());
  kv("family", inst.family());
  kv("n", std::to_string(inst.n()));
  kv("config", cfg.label());
  kv("status", to_string(r.status));
  kv("value", fmt(r.best_value));
  kv("upper_bound", fmt(r.upper_bound));
  kv("iterations", std::to_string(r.iterations));
  kv("integer_cuts", std::to_string(r.integer_cuts));
  kv("lp_cuts", std::to_string(r.lp_cuts));
  kv("master_nodes", std::to_string(r.master_nodes));
  kv("wall_time_s", fmt(r.wall_time_s));
  kv("selection", sel);
  return out;
}

std::vector<double> log_grid(int lo_exp, int hi_exp) {
  if (hi_exp < lo_exp) throw std::invalid_argument("empty grid");
  std::vector<double> grid;
  for (int k = lo_exp * 10; k <= hi_exp * 10; ++k)
    grid.push_back(k % 10 == 0 ? std::pow(10.0, k / 10) : std::pow(10.0, k / 10.0));
  return grid;
}

std::vector<ProfilePoint> performance_profile(const std::vector<BenchRecord>& records,
                                              const std::vector<double>& grid) {
  std::set<std::string> instances;
  std::map<std::string, std::vector<double>> solved;  // config -> solve times
  for (const auto& r : records) {
    instances.insert(r.instance);
    auto& times = solved[r.config];
    if (r.status == to_string(SolveStatus::optimal)) times.push_back(r.wall_time_s);
  }
  std::vector<ProfilePoint> out;
  const double total = static_cast<double>(instances.size());
  for (auto& [config, times] : solved) {
    std::sort(times.begin(), times.end());
    for (double t : grid) {
      const auto count = std::upper_bound(times.begin(), times.end(), t) - times.begin();
      out.push_back({config, t, total > 0 ? static_cast<double>(count) / total : 0.0});
    }
  }
  return out;
}

std::string write_profile_csv(const std::vector<ProfilePoint>& points) {
  std::string out = "config,t,fraction\n";
  for (const auto& p : points) out += csv_field(p.config) + "," + fmt(p.t) + "," + fmt(p.fraction) + "\n";
  return out;
}

}  // namespace emsp
