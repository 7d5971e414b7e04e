// emsp: generate, solve, bench and profile Euclidean max-sum instances.
//
// Exit codes: 0 success (solve: optimal), 1 usage error, 2 I/O or parse
// error, 3 time limit reached, 4 infeasible instance, 5 internal error.

#include "emsp/bench.hpp"
#include "emsp/cutting_planes.hpp"
#include "emsp/instances.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>

namespace {

constexpr int kUsage = 1;
constexpr int kIo = 2;
constexpr int kTimeLimit = 3;
constexpr int kInfeasible = 4;
constexpr int kInternal = 5;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double default_time_limit() {
  if (const char* env = std::getenv("EMSP_TIME_LIMIT")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && *end == '\0' && v > 0) return v;
    std::cerr << "warning: ignoring invalid EMSP_TIME_LIMIT '" << env << "'\n";
  }
  return 600;
}

emsp::EmspInstance load(const std::string& path) {
  return emsp::parse_instance(emsp::read_file(path));
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") std::cout << text;
  else emsp::write_file(path, text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Euclidean max-sum solver"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "write a seeded random instance");
  std::string family;
  emsp::GeneratorSpec spec;
  std::string gen_out;
  gen->add_option("family", family, "cdp | gdp_f | gdp_v | blmsdp")->required();
  gen->add_option("--n", spec.n, "number of points")->capture_default_str();
  gen->add_option("--coords", spec.coords, "coordinates per point")->capture_default_str();
  gen->add_option("--ratio", spec.ratio, "capacity ratio")->capture_default_str();
  gen->add_option("--phi", spec.phi, "budget ratio")->capture_default_str();
  gen->add_option("--p", spec.p, "cardinality (blmsdp)")->capture_default_str();
  gen->add_option("--delta", spec.delta, "minimum separation (blmsdp)")->capture_default_str();
  gen->add_option("--seed", spec.seed, "generator seed")->capture_default_str();
  gen->add_option("-o,--out", gen_out, "output path (default stdout)");

  // solve
  auto* sol = app.add_subcommand("solve", "solve one instance file");
  std::string sol_path, algorithm = "repeated", lp_mode = "none", report_path;
  double time_limit = default_time_limit();
  double tol = 1e-9;
  sol->add_option("instance", sol_path, "instance file")->required();
  sol->add_option("--algorithm", algorithm, "repeated | forced")->capture_default_str();
  sol->add_option("--lp-tangents", lp_mode, "none | root | all")->capture_default_str();
  sol->add_option("--time-limit", time_limit, "seconds (default EMSP_TIME_LIMIT or 600)");
  sol->add_option("--tol", tol, "relative termination tolerance")->capture_default_str();
  sol->add_option("--report", report_path, "write a key=value report here");

  // bench
  auto* bench = app.add_subcommand("bench", "solve every .emsp file in a directory");
  std::string bench_dir, bench_out, configs = "repeated/none,forced/none";
  int jobs = 1;
  double bench_limit = default_time_limit();
  bench->add_option("dir", bench_dir, "instance directory")->required();
  bench->add_option("--configs", configs, "comma-separated algorithm/mode labels")
      ->capture_default_str();
  bench->add_option("--time-limit", bench_limit, "seconds per solve");
  bench->add_option("--jobs", jobs, "parallel solves")->capture_default_str();
  bench->add_option("-o,--out", bench_out, "output CSV (default stdout)");

  // profile
  auto* prof = app.add_subcommand("profile", "performance profile from a bench CSV");
  std::string prof_in, prof_out;
  int lo_exp = -3, hi_exp = 3;
  prof->add_option("csv", prof_in, "bench CSV")->required();
  prof->add_option("--min-exp", lo_exp, "grid starts at 10^min-exp")->capture_default_str();
  prof->add_option("--max-exp", hi_exp, "grid ends at 10^max-exp")->capture_default_str();
  prof->add_option("-o,--out", prof_out, "output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (gen->parsed()) {
      try {
        spec.family = emsp::parse_family(family);
        for (const auto& w : spec.check()) std::cerr << "warning: " << w << "\n";
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      emit(gen_out, emsp::serialize_instance(emsp::generate(spec)));
      return 0;
    }

    if (sol->parsed()) {
      emsp::SolverConfig cfg;
      try {
        cfg = emsp::parse_config(algorithm + "/" + lp_mode);
        cfg.time_limit_s = time_limit;
        cfg.tolerance = tol;
        cfg.check();
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      const emsp::EmspInstance inst = load(sol_path);
      const emsp::SolveReport r = emsp::solve(inst, cfg);
      std::cout << "instance    " << inst.name() << " (" << inst.family() << ", n=" << inst.n()
                << ")\nconfig      " << cfg.label() << "\nstatus      "
                << emsp::to_string(r.status) << "\n";
      if (r.status != emsp::SolveStatus::infeasible) {
        std::ostringstream s;
        s.precision(12);
        s << "value       " << r.best_value << "\nupper bound " << r.upper_bound << "\n";
        std::cout << s.str();
      }
      std::cout << "iterations  " << r.iterations << "\ncuts        " << r.integer_cuts
                << " integer, " << r.lp_cuts << " lp\ntime        " << r.wall_time_s << " s\n";
      if (!report_path.empty()) emsp::write_file(report_path, emsp::report_text(inst, cfg, r));
      switch (r.status) {
        case emsp::SolveStatus::optimal: return 0;
        case emsp::SolveStatus::time_limit: return kTimeLimit;
        case emsp::SolveStatus::infeasible: return kInfeasible;
      }
    }

    if (bench->parsed()) {
      emsp::BenchOptions opts;
      opts.jobs = jobs;
      try {
        std::stringstream ss(configs);
        std::string label;
        while (std::getline(ss, label, ',')) {
          auto cfg = emsp::parse_config(label);
          cfg.time_limit_s = bench_limit;
          cfg.check();
          opts.configs.push_back(cfg);
        }
        if (opts.configs.empty()) throw std::invalid_argument("no configs given");
        if (jobs < 1) throw std::invalid_argument("--jobs must be at least 1");
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      emit(bench_out, emsp::write_bench_csv(emsp::run_bench(emsp::list_instances(bench_dir), opts)));
      return 0;
    }

    if (prof->parsed()) {
      std::vector<double> grid;
      try {
        grid = emsp::log_grid(lo_exp, hi_exp);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      const auto records = emsp::read_bench_csv(emsp::read_file(prof_in));
      emit(prof_out, emsp::write_profile_csv(emsp::performance_profile(records, grid)));
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const emsp::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kIo;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}
