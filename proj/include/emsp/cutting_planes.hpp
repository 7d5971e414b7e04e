#pragma once

// Tangent-plane cutting-plane solvers for the Euclidean max-sum problem.
//
// The master problem maximises an epigraph variable theta over the feasible
// set subject to theta <= h(x, y) for every pooled base point y. Two outer
// loops drive it: repeatedly solving the master to optimality (every master
// argmax yields a valid tangent), and sweeping a pinned cardinality downward
// with lazy tangents at every integer candidate (equal cardinality makes
// every such tangent valid). Either may be augmented with tangents taken at
// LP-relaxation optima of the master.

#include "emsp/edm.hpp"
#include "emsp/lp.hpp"
#include "emsp/model.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace emsp {

enum class CutOrigin { initial, integer, lp_relaxation };

struct TangentCut {
  Eigen::VectorXd base_point;  // y
  Eigen::VectorXd gradient;    // Qy
  double offset = 0;           // -1/2 <Qy, y>
  CutOrigin origin = CutOrigin::initial;
  int iteration = 0;

  double evaluate(const Eigen::VectorXd& x) const { return gradient.dot(x) + offset; }
};

/// Ordered set of tangent cuts, deduplicated by base point (inf-norm 1e-12).
class CutPool {
 public:
  /// Adds the tangent at y; returns false if an equal base point is pooled.
  bool add(const DistanceMatrixd& q, const Eigen::VectorXd& y, CutOrigin origin, int iteration);
  bool contains(const Eigen::VectorXd& y) const;

  const std::vector<TangentCut>& cuts() const { return cuts_; }
  std::size_t size() const { return cuts_.size(); }
  bool empty() const { return cuts_.empty(); }
  int count(CutOrigin origin) const;
  /// min over pooled y of h(x, y).
  double min_tangent(const Eigen::VectorXd& x) const;

 private:
  std::vector<TangentCut> cuts_;
};

enum class Algorithm { repeated_ilp, forced_cardinality };
enum class LpTangentMode { none, root_only, all_iterations };

struct SolverConfig {
  Algorithm algorithm = Algorithm::repeated_ilp;
  LpTangentMode lp_tangents = LpTangentMode::none;
  double time_limit_s = 600;
  /// Termination when UB - LB <= tolerance * (1 + |LB|).
  double tolerance = 1e-9;
  int lp_tangent_max_iters = 50;
  /// The LP loop stalls when UB improves by less than this times (1 + |UB|).
  double lp_tangent_min_improvement = 1e-6;

  /// Throws std::invalid_argument on a nonpositive time limit or negative tolerance.
  void check() const;
  /// e.g. "repeated_ilp/none".
  std::string label() const;
};

enum class SolveStatus { optimal, time_limit, infeasible };

struct BoundRecord {
  int iteration;
  double lower;
  double upper;
};

struct IterationLog {
  int iteration;
  double lower;
  double upper;
  int integer_cuts;
  int lp_cuts;
  double elapsed_s;
};

using RunLogSink = std::function<void(const IterationLog&)>;

struct SolveReport {
  SolveStatus status = SolveStatus::infeasible;
  double best_value = 0;
  Eigen::VectorXd best_solution;  // binary selection vector
  double upper_bound = kInf;
  int iterations = 0;
  int integer_cuts = 0;
  int lp_cuts = 0;
  double wall_time_s = 0;
  std::vector<BoundRecord> bound_trace;
  /// Every cut pooled during the run, in insertion order.
  std::vector<TangentCut> cuts;
  std::int64_t master_nodes = 0;
};

/// Oracle and logging hooks for a run. A null oracle selects the embedded engine.
struct SolveContext {
  MilpOracle* oracle = nullptr;
  RunLogSink log;
};

class InfeasibleInstance : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Row theta - <Qy, x> <= -1/2 <Qy, y> for variable layout (x, aux, theta).
LinearConstraint cut_row(const TangentCut& cut, int theta_index);

/// Master problem: instance variables plus theta (last), one row per cut,
/// the instance rows, sum x >= 1, then `extra`. Throws on an empty pool.
MilpModel build_master(const EmspInstance& inst, const CutPool& pool,
                       const std::vector<LinearConstraint>& extra = {});

struct InitialCut {
  Eigen::VectorXd x0;
  TangentCut cut;
};

/// Tangent at a maximum-cardinality feasible point. Throws InfeasibleInstance.
InitialCut initial_cut(const EmspInstance& inst, SolveContext ctx = {});

struct LpTangentArgs {
  /// Rows appended to the master before relaxing it.
  std::vector<LinearConstraint> extra;
  int iteration = 0;
  double time_budget_s = kInf;
  /// Objective of a known feasible selection. A tangent at a fractional
  /// optimum x is pooled only when f(x) <= this value, which makes it valid.
  double incumbent_value = -kInf;
};

/// Tangents at successive LP-relaxation optima of the master. Stops at the
/// first optimum that cannot be certified against args.incumbent_value.
/// Returns the number of cuts added.
int lp_tangent_loop(const EmspInstance& inst, CutPool& pool, const SolverConfig& cfg,
                    const LpTangentArgs& args = {}, SolveContext ctx = {});

SolveReport solve_repeated_ilp(const EmspInstance& inst, const SolverConfig& cfg,
                               SolveContext ctx = {});
SolveReport solve_forced_cardinality(const EmspInstance& inst, const SolverConfig& cfg,
                                     SolveContext ctx = {});
/// Dispatches on cfg.algorithm.
SolveReport solve(const EmspInstance& inst, const SolverConfig& cfg, SolveContext ctx = {});

const char* to_string(Algorithm a);
const char* to_string(LpTangentMode m);
const char* to_string(SolveStatus s);
const char* to_string(CutOrigin o);

}  // namespace emsp
