#include "emsp/cutting_planes.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace emsp {

namespace {

// Masters are solved essentially to optimality: a suboptimal argmax does not
// carry the validity certificate.
constexpr double kMasterGap = 1e-10;
// Lazy tangents fire only when the candidate's theta exceeds f by this much.
constexpr double kLazyTrigger = 1e-6;

using Clock = std::chrono::steady_clock;

class Stopwatch {
 public:
  Stopwatch() : start_(Clock::now()) {}
  double elapsed() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }

 private:
  Clock::time_point start_;
};

MilpOracle& oracle_of(SolveContext& ctx) {
  static thread_local EmbeddedOracle embedded;
  return ctx.oracle ? *ctx.oracle : embedded;
}

bool closed(double ub, double lb, double tol) { return ub - lb <= tol * (1 + std::abs(lb)); }

Eigen::VectorXd snap_binary(const Eigen::VectorXd& v, int n) {
  Eigen::VectorXd x = v.head(n);
  for (int i = 0; i < n; ++i) x[i] = x[i] > 0.5 ? 1.0 : 0.0;
  return x;
}

struct RunState {
  const EmspInstance& inst;
  const SolverConfig& cfg;
  SolveContext& ctx;
  Stopwatch clock;
  CutPool pool;
  SolveReport report;
  double lb = -kInf;
  double ub = kInf;

  double remaining() const { return std::max(0.0, cfg.time_limit_s - clock.elapsed()); }
  bool out_of_time() const { return clock.elapsed() >= cfg.time_limit_s; }

  void offer(const Eigen::VectorXd& x) {
    const double f = inst.objective(x);
    if (f > lb) {
      lb = f;
      report.best_solution = x;
    }
  }

  void record(int k) {
    report.bound_trace.push_back({k, lb, ub});
    if (ctx.log)
      ctx.log({k, lb, ub, pool.count(CutOrigin::integer), pool.count(CutOrigin::lp_relaxation),
               clock.elapsed()});
  }

  void run_lp_loop(int k, std::vector<LinearConstraint> extra = {}) {
    LpTangentArgs args;
    args.extra = std::move(extra);
    args.iteration = k;
    args.time_budget_s = remaining();
    args.incumbent_value = lb;
    lp_tangent_loop(inst, pool, cfg, args, ctx);
  }

  SolveReport finish(SolveStatus status, int iterations) {
    report.status = status;
    report.best_value = lb;
    report.upper_bound = std::max(lb, ub);
    report.iterations = iterations;
    report.integer_cuts = pool.count(CutOrigin::integer);
    report.lp_cuts = pool.count(CutOrigin::lp_relaxation);
    report.cuts = pool.cuts();
    report.wall_time_s = clock.elapsed();
    return std::move(report);
  }
};

RunState make_state(const EmspInstance& inst, const SolverConfig& cfg, SolveContext& ctx) {
  return RunState{inst, cfg, ctx, Stopwatch{}, CutPool{}, SolveReport{}};
}

}  // namespace

// --- CutPool ---------------------------------------------------------------

bool CutPool::contains(const Eigen::VectorXd& y) const {
  return std::any_of(cuts_.begin(), cuts_.end(), [&](const TangentCut& c) {
    return c.base_point.size() == y.size() && (c.base_point - y).lpNorm<Eigen::Infinity>() <= 1e-12;
  });
}

bool CutPool::add(const DistanceMatrixd& q, const Eigen::VectorXd& y, CutOrigin origin,
                  int iteration) {
  if (contains(y)) return false;
  auto coeffs = tangent_coefficients(q, y);
  cuts_.push_back({y, std::move(coeffs.gradient), coeffs.offset, origin, iteration});
  return true;
}

int CutPool::count(CutOrigin origin) const {
  return static_cast<int>(std::count_if(cuts_.begin(), cuts_.end(),
                                        [&](const TangentCut& c) { return c.origin == origin; }));
}

double CutPool::min_tangent(const Eigen::VectorXd& x) const {
  double best = kInf;
  for (const auto& c : cuts_) best = std::min(best, c.evaluate(x));
  return best;
}

// --- configuration ---------------------------------------------------------

void SolverConfig::check() const {
  if (!(time_limit_s > 0)) throw std::invalid_argument("time limit must be positive");
  if (!(tolerance >= 0)) throw std::invalid_argument("tolerance must be nonnegative");
  if (lp_tangent_max_iters < 0) throw std::invalid_argument("lp_tangent_max_iters must be >= 0");
  if (!(lp_tangent_min_improvement >= 0))
    throw std::invalid_argument("lp_tangent_min_improvement must be nonnegative");
}

std::string SolverConfig::label() const {
  return std::string(to_string(algorithm)) + "/" + to_string(lp_tangents);
}

const char* to_string(Algorithm a) {
  return a == Algorithm::repeated_ilp ? "repeated_ilp" : "forced_cardinality";
}

const char* to_string(LpTangentMode m) {
  switch (m) {
    case LpTangentMode::none: return "none";
    case LpTangentMode::root_only: return "root";
    case LpTangentMode::all_iterations: return "all";
  }
  return "?";
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::time_limit: return "time_limit";
    case SolveStatus::infeasible: return "infeasible";
  }
  return "?";
}

const char* to_string(CutOrigin o) {
  switch (o) {
    case CutOrigin::initial: return "initial";
    case CutOrigin::integer: return "integer";
    case CutOrigin::lp_relaxation: return "lp";
  }
  return "?";
}

// --- master problem ----------------------------------------------------------

LinearConstraint cut_row(const TangentCut& cut, int theta_index) {
  LinearConstraint row;
  row.sense = Sense::le;
  row.rhs = cut.offset;
  row.terms.reserve(cut.gradient.size() + 1);
  row.terms.push_back({theta_index, 1.0});
  for (Index i = 0; i < cut.gradient.size(); ++i)
    if (cut.gradient[i] != 0) row.terms.push_back({static_cast<int>(i), -cut.gradient[i]});
  return row;
}

MilpModel build_master(const EmspInstance& inst, const CutPool& pool,
                       const std::vector<LinearConstraint>& extra) {
  if (pool.empty()) throw std::invalid_argument("master problem needs at least one cut");
  MilpModel m;
  m.variables = inst.solver_variables();
  const int theta = m.add_variable(VariableDecl::continuous("theta", -kInf, kInf));
  m.objective.push_back({theta, 1.0});
  m.constraints.reserve(pool.size() + inst.solver_constraints().size() + 1 + extra.size());
  for (const auto& c : pool.cuts()) m.constraints.push_back(cut_row(c, theta));
  for (const auto& c : inst.solver_constraints()) m.constraints.push_back(c);
  m.constraints.push_back(nonzero_selection_row(inst.n()));
  for (const auto& c : extra) m.constraints.push_back(c);
  return m;
}

InitialCut initial_cut(const EmspInstance& inst, SolveContext ctx) {
  const MilpSolution sol = oracle_of(ctx).solve_milp(max_cardinality_model(inst), {}, {});
  if (sol.status == MilpStatus::infeasible)
    throw InfeasibleInstance("instance " + inst.name() + " has no nonzero feasible selection");
  if (!sol.incumbent) throw std::runtime_error("max-cardinality solve failed: " +
                                               std::string(to_string(sol.status)));
  const Eigen::VectorXd x0 = snap_binary(*sol.incumbent, inst.n());
  auto coeffs = tangent_coefficients(inst.q(), x0);
  return {x0, TangentCut{x0, std::move(coeffs.gradient), coeffs.offset, CutOrigin::initial, 0}};
}

// --- LP-relaxation tangents ------------------------------------------------

int lp_tangent_loop(const EmspInstance& inst, CutPool& pool, const SolverConfig& cfg,
                    const LpTangentArgs& args, SolveContext ctx) {
  if (pool.empty()) throw std::invalid_argument("LP tangent loop needs a populated pool");
  Stopwatch clock;
  const int n = inst.n();
  int added = 0;
  double lb = 0;
  double prev_ub = kInf;
  for (int it = 0; it < cfg.lp_tangent_max_iters; ++it) {
    if (clock.elapsed() >= args.time_budget_s) break;
    const LpSolution lp = oracle_of(ctx).solve_lp(build_master(inst, pool, args.extra));
    if (lp.status != LpStatus::optimal) break;
    const Eigen::VectorXd x = lp.values.head(n).cwiseMax(0.0).cwiseMin(1.0);
    const double theta = lp.objective_value;
    const double fx = inst.objective(x);
    lb = std::max(lb, fx);
    // Certified only when f(x) does not exceed a known feasible value.
    if (fx > args.incumbent_value) break;
    if (!pool.add(inst.q(), x, CutOrigin::lp_relaxation, args.iteration)) break;
    ++added;
    if (closed(theta, lb, cfg.tolerance)) break;
    if (prev_ub - theta < cfg.lp_tangent_min_improvement * (1 + std::abs(theta))) break;
    prev_ub = theta;
  }
  return added;
}

// --- repeated master solves ------------------------------------------------

SolveReport solve_repeated_ilp(const EmspInstance& inst, const SolverConfig& cfg,
                               SolveContext ctx) {
  cfg.check();
  RunState st = make_state(inst, cfg, ctx);
  const int n = inst.n();

  InitialCut init;
  try {
    init = initial_cut(inst, ctx);
  } catch (const InfeasibleInstance&) {
    return st.finish(SolveStatus::infeasible, 0);
  }
  st.pool.add(inst.q(), init.x0, CutOrigin::initial, 0);
  st.offer(init.x0);
  st.record(0);
  if (cfg.lp_tangents != LpTangentMode::none) st.run_lp_loop(0);

  MilpOracle& oracle = oracle_of(ctx);
  for (int k = 1;; ++k) {
    if (st.out_of_time()) return st.finish(SolveStatus::time_limit, k - 1);
    MilpLimits limits;
    limits.time_limit_s = st.remaining();
    limits.relative_gap = kMasterGap;
    const MilpSolution sol = oracle.solve_milp(build_master(inst, st.pool), {}, limits);
    st.report.master_nodes += sol.node_count;
    if (sol.status != MilpStatus::optimal) {
      if (sol.status == MilpStatus::time_limit || sol.status == MilpStatus::node_limit) {
        st.ub = std::min(st.ub, std::max(sol.best_bound, st.lb));
        if (sol.incumbent) st.offer(snap_binary(*sol.incumbent, n));
        st.record(k);
        return st.finish(SolveStatus::time_limit, k);
      }
      throw std::runtime_error("master solve failed: " + std::string(to_string(sol.status)));
    }
    const Eigen::VectorXd xk = snap_binary(*sol.incumbent, n);
    st.ub = std::min(st.ub, *sol.objective_value);
    st.offer(xk);
    st.pool.add(inst.q(), xk, CutOrigin::integer, k);
    st.record(k);
    if (closed(st.ub, st.lb, cfg.tolerance)) return st.finish(SolveStatus::optimal, k);
    if (cfg.lp_tangents == LpTangentMode::all_iterations) st.run_lp_loop(k);
  }
}

// --- forced cardinality ----------------------------------------------------

SolveReport solve_forced_cardinality(const EmspInstance& inst, const SolverConfig& cfg,
                                     SolveContext ctx) {
  cfg.check();
  RunState st = make_state(inst, cfg, ctx);
  const int n = inst.n();

  InitialCut init;
  try {
    init = initial_cut(inst, ctx);
  } catch (const InfeasibleInstance&) {
    return st.finish(SolveStatus::infeasible, 0);
  }
  st.pool.add(inst.q(), init.x0, CutOrigin::initial, 0);
  st.offer(init.x0);
  st.record(0);
  int c = static_cast<int>(std::lround(init.x0.sum()));
  if (cfg.lp_tangents != LpTangentMode::none) st.run_lp_loop(0);

  MilpOracle& oracle = oracle_of(ctx);
  const int theta_index = inst.num_variables();
  int k = 0;
  while (c >= 1) {
    ++k;
    if (st.out_of_time()) return st.finish(SolveStatus::time_limit, k - 1);

    // Pinned level: every integer candidate has cardinality c, so its tangent
    // is valid for everything at or below this level that beats it.
    LazyCutCallback lazy = [&](const Eigen::VectorXd& values, double theta) {
      const Eigen::VectorXd xh = snap_binary(values, n);
      const double fh = inst.objective(xh);
      st.offer(xh);
      std::vector<LinearConstraint> rows;
      if (theta > fh + kLazyTrigger * (1 + std::abs(fh)) &&
          st.pool.add(inst.q(), xh, CutOrigin::integer, k))
        rows.push_back(cut_row(st.pool.cuts().back(), theta_index));
      return rows;
    };
    MilpLimits limits;
    limits.time_limit_s = st.remaining();
    limits.relative_gap = kMasterGap;
    const MilpSolution pinned =
        oracle.solve_milp(build_master(inst, st.pool, {cardinality_row(n, Sense::eq, c)}), lazy,
                          limits);
    st.report.master_nodes += pinned.node_count;
    if (pinned.status == MilpStatus::time_limit || pinned.status == MilpStatus::node_limit) {
      st.ub = std::max(st.lb, st.ub);
      st.record(k);
      return st.finish(SolveStatus::time_limit, k);
    }
    if (pinned.status == MilpStatus::optimal) {
      st.offer(snap_binary(*pinned.incumbent, n));
    } else if (pinned.status != MilpStatus::infeasible) {
      throw std::runtime_error("pinned master failed: " + std::string(to_string(pinned.status)));
    }

    // Upper bound for every lower level.
    double level_ub = -kInf;
    if (c - 1 >= 1) {
      MilpLimits ub_limits;
      ub_limits.time_limit_s = st.remaining();
      ub_limits.relative_gap = kMasterGap;
      const MilpSolution below = oracle.solve_milp(
          build_master(inst, st.pool, {cardinality_row(n, Sense::le, c - 1)}), {}, ub_limits);
      st.report.master_nodes += below.node_count;
      if (below.status == MilpStatus::optimal) {
        level_ub = *below.objective_value;
      } else if (below.status == MilpStatus::time_limit || below.status == MilpStatus::node_limit) {
        st.ub = std::min(st.ub, std::max(st.lb, below.best_bound));
        st.record(k);
        return st.finish(SolveStatus::time_limit, k);
      } else if (below.status != MilpStatus::infeasible) {
        throw std::runtime_error("bound master failed: " + std::string(to_string(below.status)));
      }
    }
    st.ub = std::min(st.ub, std::max(st.lb, level_ub));
    st.record(k);
    if (level_ub <= st.lb + cfg.tolerance * (1 + std::abs(st.lb)))
      return st.finish(SolveStatus::optimal, k);
    if (cfg.lp_tangents == LpTangentMode::all_iterations)
      st.run_lp_loop(k, {cardinality_row(n, Sense::le, c - 1)});
    --c;
  }
  return st.finish(SolveStatus::optimal, k);
}

SolveReport solve(const EmspInstance& inst, const SolverConfig& cfg, SolveContext ctx) {
  cfg.check();
  return cfg.algorithm == Algorithm::repeated_ilp ? solve_repeated_ilp(inst, cfg, ctx)
                                                  : solve_forced_cardinality(inst, cfg, ctx);
}

}  // namespace emsp
