#pragma once

// Euclidean max-sum instances: a distance matrix over n selectable points and a
// polyhedral constraint system, stored as the declarative blocks it was built
// from so that it serialises losslessly.

#include "emsp/edm.hpp"
#include "emsp/linear.hpp"
#include "emsp/lp.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace emsp {

/// sum_i weight_i x_i <= capacity
struct KnapsackBlock {
  double capacity = 0;
  std::vector<double> weights;
  friend bool operator==(const KnapsackBlock&, const KnapsackBlock&) = default;
};

/// sum_i x_i = p (sense eq) or sum_i x_i <= p (sense le)
struct CardinalityBlock {
  Sense sense = Sense::eq;
  int p = 0;
  friend bool operator==(const CardinalityBlock&, const CardinalityBlock&) = default;
};

/// Fixed-cost generalised dispersion: sum c_i x_i >= B, sum a_i x_i <= K.
struct GdpFixedBlock {
  double min_capacity = 0;  // B
  double budget = 0;        // K
  std::vector<double> capacity;
  std::vector<double> fixed_cost;
  friend bool operator==(const GdpFixedBlock&, const GdpFixedBlock&) = default;
};

/// Variable-cost generalised dispersion. Introduces one integer variable
/// t_i in [0, c_i] per point with t_i <= c_i x_i, sum t_i >= B and
/// sum (a_i x_i + b_i t_i) <= K.
struct GdpVariableBlock {
  double min_capacity = 0;
  double budget = 0;
  std::vector<double> capacity;
  std::vector<double> fixed_cost;
  std::vector<double> variable_cost;
  friend bool operator==(const GdpVariableBlock&, const GdpVariableBlock&) = default;
};

/// Minimum separation: for every i whose strict neighbourhood
/// {j : q_ij < delta} (which contains i itself) has at least two members,
/// sum over that neighbourhood of x_j <= 1.
struct ConflictBlock {
  double delta = 0;
  friend bool operator==(const ConflictBlock&, const ConflictBlock&) = default;
};

/// An arbitrary row over selection and auxiliary variables.
struct RowBlock {
  LinearConstraint row;
  friend bool operator==(const RowBlock& a, const RowBlock& b) {
    return a.row.sense == b.row.sense && a.row.rhs == b.row.rhs && a.row.terms == b.row.terms;
  }
};

using ConstraintBlock = std::variant<KnapsackBlock, CardinalityBlock, GdpFixedBlock,
                                     GdpVariableBlock, ConflictBlock, RowBlock>;

/// Whether the distances were read from a file or computed from coordinates.
enum class DistanceSource { computed, read };

class EmspInstance {
 public:
  /// Distances computed from `points`.
  EmspInstance(std::string name, PointSetd points, std::vector<ConstraintBlock> blocks);
  /// Explicit distances; `points` optional.
  EmspInstance(std::string name, std::optional<PointSetd> points, DistanceMatrixd q,
               std::vector<ConstraintBlock> blocks);

  const std::string& name() const { return name_; }
  int n() const { return static_cast<int>(q_.size()); }
  const std::optional<PointSetd>& points() const { return points_; }
  const DistanceMatrixd& q() const { return q_; }
  DistanceSource distance_source() const { return source_; }
  const std::vector<ConstraintBlock>& blocks() const { return blocks_; }

  /// Selection variables 0..n-1 followed by auxiliary variables.
  const std::vector<VariableDecl>& variables() const { return variables_; }
  int num_variables() const { return static_cast<int>(variables_.size()); }
  /// Rows generated from the blocks, excluding the x != 0 row.
  const std::vector<LinearConstraint>& constraints() const { return constraints_; }

  /// Same variable layout as variables()/constraints(), with the same set of
  /// feasible selections, in the form handed to MILP solvers. When no ROW
  /// block touches an auxiliary variable, each variable-cost block uses
  /// continuous t_i <= floor(c_i) x_i and sum t_i >= ceil(B): for a fixed
  /// selection the cheapest-first fill is integral, so integer t exist iff
  /// real ones do.
  const std::vector<VariableDecl>& solver_variables() const { return solver_variables_; }
  const std::vector<LinearConstraint>& solver_constraints() const { return solver_constraints_; }

  /// Generator seed, when the instance came from a seeded generator.
  std::optional<std::uint64_t> seed;

  /// "cdp", "gdp_f", "gdp_v", "blmsdp" or "custom", from the block mix.
  std::string family() const;

  double objective(const Eigen::VectorXd& x) const { return emsp::objective(q_, x.head(n())); }

 private:
  void expand_blocks();

  std::string name_;
  std::optional<PointSetd> points_;
  DistanceMatrixd q_;
  DistanceSource source_;
  std::vector<ConstraintBlock> blocks_;
  std::vector<VariableDecl> variables_;
  std::vector<LinearConstraint> constraints_;
  std::vector<VariableDecl> solver_variables_;
  std::vector<LinearConstraint> solver_constraints_;
};

/// sum_i x_i >= 1, the row that removes x = 0 from the feasible set.
LinearConstraint nonzero_selection_row(int n);
/// sum_i x_i <sense> rhs over the selection variables.
LinearConstraint cardinality_row(int n, Sense sense, double rhs);

/// Empty list iff every invariant holds.
std::vector<std::string> validate(const EmspInstance& inst);

/// Membership in the feasible set, including integrality and x != 0.
/// `assignment` covers every variable (selection then auxiliary).
bool is_feasible(const EmspInstance& inst, const Eigen::VectorXd& assignment, double tol = 1e-9);

/// Solver variables and rows of the instance plus sum x >= 1; no objective.
MilpModel base_model(const EmspInstance& inst);

/// max sum_i x_i over the feasible set.
MilpModel max_cardinality_model(const EmspInstance& inst);

}  // namespace emsp
