#include "emsp/lp.hpp"
#include "emsp/simplex.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace emsp {

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::iteration_limit: return "iteration_limit";
    case LpStatus::numerical_failure: return "numerical_failure";
  }
  return "?";
}

const char* to_string(MilpStatus s) {
  switch (s) {
    case MilpStatus::optimal: return "optimal";
    case MilpStatus::infeasible: return "infeasible";
    case MilpStatus::unbounded: return "unbounded";
    case MilpStatus::node_limit: return "node_limit";
    case MilpStatus::time_limit: return "time_limit";
    case MilpStatus::error: return "error";
  }
  return "?";
}

std::vector<std::string> MilpModel::problems() const {
  std::vector<std::string> out;
  const int n = num_variables();
  for (int j = 0; j < n; ++j) {
    const auto& v = variables[j];
    if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper)
      out.push_back("variable " + v.name + " has invalid bounds");
  }
  auto check_terms = [&](const std::vector<Term>& terms, const std::string& where) {
    for (const auto& t : terms) {
      if (t.var < 0 || t.var >= n)
        out.push_back(where + " references unknown variable " + std::to_string(t.var));
      else if (!std::isfinite(t.coef))
        out.push_back(where + " has a non-finite coefficient");
    }
  };
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    check_terms(constraints[i].terms, "constraint " + std::to_string(i));
    if (!std::isfinite(constraints[i].rhs))
      out.push_back("constraint " + std::to_string(i) + " has a non-finite rhs");
  }
  check_terms(objective, "objective");
  return out;
}

namespace {

Eigen::RowVectorXd dense_row(const LinearConstraint& c, int n) {
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n);
  for (const auto& t : c.terms) row[t.var] += t.coef;
  return row;
}

std::pair<double, double> row_range(const LinearConstraint& c) {
  switch (c.sense) {
    case Sense::le: return {-kInf, c.rhs};
    case Sense::ge: return {c.rhs, kInf};
    case Sense::eq: return {c.rhs, c.rhs};
  }
  return {-kInf, kInf};
}

/// Builds the engine for the relaxation of `m`, minimising -objective.
BoundedSimplex make_engine(const MilpModel& m, bool round_integer_bounds) {
  const auto issues = m.problems();
  if (!issues.empty()) throw std::invalid_argument("invalid model: " + issues.front());
  const int n = m.num_variables();
  const int rows = static_cast<int>(m.constraints.size());
  Eigen::MatrixXd a(rows, n);
  Eigen::VectorXd rlo(rows), rhi(rows), clo(n), chi(n), cost = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < rows; ++i) {
    a.row(i) = dense_row(m.constraints[i], n);
    std::tie(rlo[i], rhi[i]) = row_range(m.constraints[i]);
  }
  for (int j = 0; j < n; ++j) {
    const auto& v = m.variables[j];
    clo[j] = v.lower;
    chi[j] = v.upper;
    if (round_integer_bounds && v.is_integral()) {
      clo[j] = std::ceil(v.lower - 1e-9);
      chi[j] = std::floor(v.upper + 1e-9);
    }
  }
  for (const auto& t : m.objective) cost[t.var] -= t.coef;
  return BoundedSimplex(std::move(a), std::move(rlo), std::move(rhi), std::move(clo),
                        std::move(chi), std::move(cost));
}

}  // namespace

LpSolution solve_lp(const MilpModel& model) {
  BoundedSimplex engine = make_engine(model, false);
  LpSolution sol;
  sol.status = engine.solve();
  sol.iterations = engine.iterations();
  sol.values = engine.primal();
  if (sol.status == LpStatus::optimal) {
    sol.objective_value = model.objective_at(sol.values);
    const Eigen::VectorXd d = engine.reduced_costs();
    sol.reduced_costs = -d.head(model.num_variables());
    sol.row_duals = -engine.multipliers();
    sol.optimality_verified = true;
  }
  return sol;
}

namespace {

struct BoundChange {
  int var;
  double lo, hi;
};

struct Node {
  std::int64_t id;
  double bound;
  std::vector<BoundChange> changes;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;
    // Equal bounds: newest first, which dives instead of sweeping a level.
    return a.id < b.id;
  }
};

}  // namespace

MilpSolution solve_milp(const MilpModel& model, const LazyCutCallback& callback,
                        const MilpLimits& limits) {
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  const int n = model.num_variables();
  for (const auto& v : model.variables)
    if (v.is_integral() && (!std::isfinite(v.lower) || !std::isfinite(v.upper)))
      throw std::invalid_argument("integer variable " + v.name + " must be bounded");

  BoundedSimplex engine = make_engine(model, true);
  std::vector<double> root_lo(n), root_hi(n);
  std::vector<int> integer_vars;
  for (int j = 0; j < n; ++j) {
    root_lo[j] = engine.col_lower(j);
    root_hi[j] = engine.col_upper(j);
    if (model.variables[j].is_integral()) integer_vars.push_back(j);
  }

  MilpSolution out;
  for (int j : integer_vars)
    if (root_lo[j] > root_hi[j]) {
      out.status = MilpStatus::infeasible;
      out.best_bound = -kInf;
      return out;
    }

  // With integer coefficients on integer variables only, every objective value
  // lies in offset + Z and LP bounds can be rounded down onto that lattice.
  bool integral_objective = !model.objective.empty();
  for (const auto& t : model.objective)
    integral_objective = integral_objective && model.variables[t.var].is_integral() &&
                         t.coef == std::round(t.coef);
  auto rounded = [&](double bound) {
    if (!integral_objective || !std::isfinite(bound)) return bound;
    const double off = model.objective_offset;
    return off + std::floor(bound - off + 1e-6 * (1 + std::abs(bound)));
  };

  double incumbent_obj = -kInf;
  Eigen::VectorXd incumbent;
  double global_bound = kInf;
  auto gap_closed = [&](double bound) {
    return rounded(bound) <= incumbent_obj + limits.relative_gap * (1 + std::abs(incumbent_obj));
  };

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  std::int64_t next_id = 0;
  open.push(Node{next_id++, kInf, {}});
  std::vector<BoundChange> applied;
  bool unbounded = false;
  bool failed = false;
  bool hit_time = false, hit_nodes = false;

  while (!open.empty()) {
    if (elapsed() > limits.time_limit_s) {
      hit_time = true;
      break;
    }
    if (out.node_count >= limits.node_limit) {
      hit_nodes = true;
      break;
    }
    Node node = open.top();
    open.pop();
    if (incumbent.size() > 0 && gap_closed(node.bound)) {
      // Best-bound order: every remaining node is dominated as well.
      while (!open.empty()) open.pop();
      break;
    }
    global_bound = std::min(global_bound, std::max(rounded(node.bound), incumbent_obj));

    for (const auto& c : applied) engine.set_col_bounds(c.var, root_lo[c.var], root_hi[c.var]);
    for (const auto& c : node.changes) engine.set_col_bounds(c.var, c.lo, c.hi);
    applied = node.changes;
    // Each node warm-starts from the basis the previous node finished with.
    ++out.node_count;

    while (true) {
      const int before = engine.iterations();
      const LpStatus st = engine.solve();
      out.lp_iterations += engine.iterations() - before;
      ++out.lp_solves;
      if (st == LpStatus::optimal) ++out.lp_verified_optimal;
      if (st == LpStatus::infeasible) ++out.lp_infeasible;
      if (st == LpStatus::infeasible) break;
      if (st == LpStatus::unbounded) {
        unbounded = true;
        break;
      }
      if (st != LpStatus::optimal) {
        failed = true;
        break;
      }
      const Eigen::VectorXd x = engine.primal();
      const double obj = model.objective_at(x);
      if (incumbent.size() > 0 && gap_closed(obj)) break;

      int branch_var = -1;
      double best_frac = -1;
      for (int j : integer_vars) {
        const double f = x[j] - std::floor(x[j]);
        const double dist = std::min(f, 1 - f);
        if (dist > limits.integrality_tol && dist > best_frac + 1e-12) {
          best_frac = dist;
          branch_var = j;
        }
      }

      if (branch_var >= 0) {
        const double v = x[branch_var];
        const double lo = engine.col_lower(branch_var), hi = engine.col_upper(branch_var);
        Node down{next_id++, obj, node.changes};
        down.changes.push_back({branch_var, lo, std::floor(v)});
        Node up{next_id++, obj, node.changes};
        up.changes.push_back({branch_var, std::ceil(v), hi});
        open.push(std::move(down));
        open.push(std::move(up));
        break;
      }

      Eigen::VectorXd candidate = x;
      for (int j : integer_vars) candidate[j] = std::round(x[j]);
      const double cand_obj = model.objective_at(candidate);
      if (callback) {
        auto cuts = callback(candidate, cand_obj);
        bool violated = false;
        for (const auto& c : cuts) {
          const auto problems = MilpModel{model.variables, {c}, {}, 0}.problems();
          if (!problems.empty()) throw std::invalid_argument("lazy cut: " + problems.front());
          const auto [lo, hi] = row_range(c);
          engine.add_row(dense_row(c, n), lo, hi);
          ++out.lazy_cuts_added;
          violated = violated || !c.satisfied(x, 1e-9);
        }
        if (violated) continue;
      }
      if (cand_obj > incumbent_obj) {
        incumbent_obj = cand_obj;
        incumbent = candidate;
      }
      break;
    }
    if (unbounded || failed) break;
    out.bound_trace.push_back(global_bound);
  }

  if (unbounded) {
    out.status = MilpStatus::unbounded;
    return out;
  }
  if (failed) {
    out.status = MilpStatus::error;
    if (incumbent.size() > 0) {
      out.incumbent = incumbent;
      out.objective_value = incumbent_obj;
    }
    out.best_bound = global_bound;
    return out;
  }

  double open_bound = -kInf;
  if (!open.empty()) open_bound = open.top().bound;
  if (incumbent.size() > 0) {
    out.incumbent = incumbent;
    out.objective_value = incumbent_obj;
  }
  if (hit_time || hit_nodes) {
    out.status = hit_time ? MilpStatus::time_limit : MilpStatus::node_limit;
    out.best_bound = std::min(global_bound, std::max(rounded(open_bound), incumbent_obj));
  } else if (incumbent.size() > 0) {
    out.status = MilpStatus::optimal;
    out.best_bound = incumbent_obj;
  } else {
    out.status = MilpStatus::infeasible;
    out.best_bound = -kInf;
  }
  out.bound_trace.push_back(out.best_bound);
  return out;
}

}  // namespace emsp
