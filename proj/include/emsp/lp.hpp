#pragma once

// Generic mixed-integer linear models and the embedded LP / MILP engine.
//
// All models are maximisation problems. The MILP engine is a best-bound
// branch-and-bound over a bounded-variable simplex, with a lazy-constraint
// callback invoked at every integer-feasible candidate.

#include "emsp/linear.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace emsp {

struct MilpModel {
  std::vector<VariableDecl> variables;
  std::vector<LinearConstraint> constraints;
  std::vector<Term> objective;  // maximised
  double objective_offset = 0;

  int add_variable(VariableDecl v) {
    variables.push_back(std::move(v));
    return static_cast<int>(variables.size()) - 1;
  }
  void add_constraint(LinearConstraint c) { constraints.push_back(std::move(c)); }
  int num_variables() const { return static_cast<int>(variables.size()); }

  double objective_at(const Eigen::VectorXd& x) const {
    double s = objective_offset;
    for (const auto& t : objective) s += t.coef * x[t.var];
    return s;
  }

  /// Reference errors: unknown variable indices, non-finite data, inverted bounds.
  std::vector<std::string> problems() const;
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit, numerical_failure };

struct LpSolution {
  LpStatus status = LpStatus::numerical_failure;
  Eigen::VectorXd values;         // one entry per model variable
  double objective_value = 0;
  Eigen::VectorXd reduced_costs;  // d_j of the maximisation problem
  Eigen::VectorXd row_duals;      // one per constraint
  bool optimality_verified = false;
  int iterations = 0;
};

enum class MilpStatus { optimal, infeasible, unbounded, node_limit, time_limit, error };

struct MilpSolution {
  MilpStatus status = MilpStatus::error;
  std::optional<Eigen::VectorXd> incumbent;
  std::optional<double> objective_value;
  double best_bound = std::numeric_limits<double>::infinity();
  std::int64_t node_count = 0;
  std::int64_t lp_iterations = 0;
  /// Simplex terminations: total, optimal with the optimality conditions
  /// verified, and infeasible.
  std::int64_t lp_solves = 0;
  std::int64_t lp_verified_optimal = 0;
  std::int64_t lp_infeasible = 0;
  int lazy_cuts_added = 0;
  /// Global dual bound after each processed node.
  std::vector<double> bound_trace;
};

struct MilpLimits {
  double time_limit_s = std::numeric_limits<double>::infinity();
  std::int64_t node_limit = std::numeric_limits<std::int64_t>::max();
  double relative_gap = 1e-9;
  double integrality_tol = 1e-6;
};

/// Invoked at every integer-feasible candidate with the candidate values
/// (integer variables snapped) and its objective. An empty return accepts
/// the candidate; otherwise the rows are added globally and the node is
/// re-solved.
using LazyCutCallback =
    std::function<std::vector<LinearConstraint>(const Eigen::VectorXd& values, double objective)>;

/// Solves the LP relaxation (integrality ignored).
LpSolution solve_lp(const MilpModel& model);

MilpSolution solve_milp(const MilpModel& model, const LazyCutCallback& callback = {},
                        const MilpLimits& limits = {});

/// Solver boundary used by the cutting-plane layer. The embedded engine is the
/// default; an adapter around an external solver can be passed instead.
class MilpOracle {
 public:
  virtual ~MilpOracle() = default;
  virtual LpSolution solve_lp(const MilpModel& model) = 0;
  virtual MilpSolution solve_milp(const MilpModel& model, const LazyCutCallback& callback,
                                  const MilpLimits& limits) = 0;
};

class EmbeddedOracle final : public MilpOracle {
 public:
  LpSolution solve_lp(const MilpModel& model) override { return emsp::solve_lp(model); }
  MilpSolution solve_milp(const MilpModel& model, const LazyCutCallback& callback,
                          const MilpLimits& limits) override {
    return emsp::solve_milp(model, callback, limits);
  }
};

const char* to_string(LpStatus s);
const char* to_string(MilpStatus s);

}  // namespace emsp
