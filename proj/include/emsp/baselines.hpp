#pragma once

// Reference methods: the Glover linearisation as a plain MILP, and exhaustive
// enumeration for small instances.

#include "emsp/lp.hpp"
#include "emsp/model.hpp"

#include <cstdint>
#include <vector>

namespace emsp {

/// max sum_i w_i with w_i <= x_i sum_{j>i} q_ij, w_i <= sum_{j>i} q_ij x_j,
/// w_i >= 0, over the instance constraints and sum x >= 1. The w variables
/// follow the instance variables.
MilpModel glover_model(const EmspInstance& inst);

struct BruteForceResult {
  bool feasible = false;
  double best_value = 0;
  /// Every selection within 1e-12 of best_value.
  std::vector<Eigen::VectorXd> best_solutions;
  /// Number of feasible nonzero selections.
  std::int64_t enumerated = 0;
};

inline constexpr int kBruteForceMaxN = 25;

/// Exact maximum of f over the feasible set by enumerating all 2^n - 1 nonzero
/// selections. Auxiliary variables are resolved per selection: variable-cost
/// dispersion blocks greedily, anything else by enumerating their (small)
/// integer ranges. Throws std::length_error when n > kBruteForceMaxN.
BruteForceResult brute_force(const EmspInstance& inst);

}  // namespace emsp
