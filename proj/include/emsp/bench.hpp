#pragma once

// Benchmark records, batch runs over instance directories, machine-readable
// solve reports and performance-profile tables.

#include "emsp/cutting_planes.hpp"
#include "emsp/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace emsp {

struct BenchRecord {
  std::string instance;
  std::string family;
  int n = 0;
  int coords = 0;
  std::string config;
  std::string status;
  double value = 0;
  double upper_bound = 0;
  int iterations = 0;
  int integer_cuts = 0;
  int lp_cuts = 0;
  double wall_time_s = 0;
  std::optional<std::uint64_t> seed;

  friend bool operator==(const BenchRecord&, const BenchRecord&) = default;
};

BenchRecord make_record(const std::string& instance, const EmspInstance& inst,
                        const SolverConfig& cfg, const SolveReport& report);

/// Header line:
/// instance,family,n,coords,config,status,value,upper_bound,iterations,
/// integer_cuts,lp_cuts,wall_time_s,seed
std::string write_bench_csv(const std::vector<BenchRecord>& records);
/// Inverse of write_bench_csv. Throws std::invalid_argument with a line number.
std::vector<BenchRecord> read_bench_csv(std::string_view text);

/// Parses "repeated/none", "forced/all" and similar; the algorithm accepts
/// repeated, repeated_ilp, forced or forced_cardinality, the mode none, root
/// or all.
SolverConfig parse_config(std::string_view label);

struct BenchOptions {
  std::vector<SolverConfig> configs;
  int jobs = 1;
};

/// Solves every (file, config) pair, one single-threaded solve per worker.
/// Records are sorted by (instance path, config label) whatever the number
/// of jobs. Unreadable files throw before any solve starts.
std::vector<BenchRecord> run_bench(const std::vector<std::string>& paths, const BenchOptions& opts);
/// Regular files with extension .emsp directly inside `dir`, sorted.
std::vector<std::string> list_instances(const std::string& dir);

/// key=value lines, one per report field.
std::string report_text(const EmspInstance& inst, const SolverConfig& cfg, const SolveReport& r);

struct ProfilePoint {
  std::string config;
  double t;
  double fraction;
};

/// Ten points per decade from 10^lo_exp to 10^hi_exp inclusive; decades exact.
std::vector<double> log_grid(int lo_exp, int hi_exp);

/// For each config (sorted) and grid time t, the fraction of distinct
/// instances in `records` solved to optimality within t seconds.
std::vector<ProfilePoint> performance_profile(const std::vector<BenchRecord>& records,
                                              const std::vector<double>& grid);
/// header config,t,fraction
std::string write_profile_csv(const std::vector<ProfilePoint>& points);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace emsp
