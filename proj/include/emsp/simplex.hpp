#pragma once

// Bounded-variable primal simplex on the row form  A x - r = 0,
// lo <= (x, r) <= hi, minimising c'x.
//
// The basis is represented through its kernel: the submatrix of A on rows
// whose logical is nonbasic and on basic structural columns. Only the kernel
// inverse is stored (at most cols x cols), updated by rank-one and bordering
// formulas, with a fresh LU factorisation every `kRefactorInterval` pivots. Pricing is Dantzig
// with a Harris ratio test; after 5 N consecutive degenerate pivots the
// engine falls back to Bland's rule until the objective moves again. Solves
// that start from a dual feasible basis (after bound changes or added rows)
// first run dual simplex pivots.

#include "emsp/lp.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace emsp {

class BoundedSimplex {
 public:
  enum class VarStatus : std::uint8_t { basic, at_lower, at_upper, at_zero };

  /// `a` is rows x structurals; row activities r = A x are bounded by
  /// [row_lo, row_hi]; `cost` is minimised.
  BoundedSimplex(Eigen::MatrixXd a, Eigen::VectorXd row_lo, Eigen::VectorXd row_hi,
                 Eigen::VectorXd col_lo, Eigen::VectorXd col_hi, Eigen::VectorXd cost);

  int rows() const { return static_cast<int>(a_.rows()); }
  int cols() const { return static_cast<int>(a_.cols()); }

  void set_col_bounds(int j, double lo, double hi);
  double col_lower(int j) const { return lo_[j]; }
  double col_upper(int j) const { return hi_[j]; }
  void add_row(const Eigen::RowVectorXd& coefs, double lo, double hi);

  /// Runs phase 1/phase 2 from the current basis.
  LpStatus solve();

  /// Primal values of the structural variables.
  Eigen::VectorXd primal() const { return x_.head(cols()); }
  /// Row activities.
  Eigen::VectorXd activities() const { return x_.tail(rows()); }
  double objective() const;
  /// Reduced costs of all N = cols + rows variables (minimisation sense).
  Eigen::VectorXd reduced_costs() const;
  /// Simplex multipliers pi = c_B' B^{-1}.
  Eigen::VectorXd multipliers() const;

  /// Recomputes x_B, refactorising when the primal or dual residual of the
  /// current inverse exceeds the tolerance, and checks primal feasibility and
  /// reduced-cost sign conditions.
  bool verify_optimality();

  std::vector<VarStatus> basis() const { return status_; }
  /// Loads a basis; statuses for variables added after it was taken default
  /// to basic logicals. Falls back to the slack basis if inconsistent.
  void set_basis(const std::vector<VarStatus>& status);

  int iterations() const { return iterations_; }
  bool used_bland() const { return bland_pivots_ > 0; }

  static constexpr int kRefactorInterval = 100;
  static constexpr double kPrimalTol = 1e-9;
  static constexpr double kDualTol = 1e-9;
  static constexpr double kPivotTol = 1e-9;

 private:
  enum class DualOutcome { primal_feasible, infeasible, gave_up };

  int total() const { return cols() + rows(); }
  /// Dual simplex pivots from a dual feasible basis until the basis is primal
  /// feasible or a row proves infeasibility. Gives up, leaving a valid basis
  /// for the primal loop, when the basis is not dual feasible.
  DualOutcome dual_phase();
  bool refactor();
  void slack_basis();
  void compute_basic_values();
  void place_nonbasic(int j);
  Eigen::VectorXd ftran(int j) const;
  /// Solves B z = b; z is indexed by basis position.
  Eigen::VectorXd solve_basis(const Eigen::VectorXd& b) const;
  /// Solves B' y = cb for cb indexed by basis position.
  Eigen::VectorXd btran(const Eigen::VectorXd& cb) const;
  /// Puts q into basis position p and updates the kernel inverse. Returns
  /// false when the update was unstable and a refactorisation is required.
  bool replace_basic(int p, int q);
  double infeasibility(int j) const;
  bool primal_feasible(double tol) const;
  bool residuals_small(double tol) const;

  Eigen::MatrixXd a_;
  Eigen::VectorXd lo_, hi_, cost_, x_;
  std::vector<VarStatus> status_;
  std::vector<int> head_;
  std::vector<int> ks_, kr_;  // kernel columns and rows
  std::vector<int> spos_, rpos_;  // their kernel positions, or -1
  Eigen::MatrixXd kinv_;
  bool factor_valid_ = false;
  bool values_stale_ = false;
  int since_refactor_ = 0;
  int iterations_ = 0;
  int bland_pivots_ = 0;
};

}  // namespace emsp
