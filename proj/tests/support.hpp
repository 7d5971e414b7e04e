#pragma once

// Test-side oracles and generators, written independently of the library
// algorithms they check.

#include "emsp/instances.hpp"
#include "emsp/lp.hpp"
#include "emsp/model.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

namespace testing_support {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Index = Eigen::Index;

struct Gen {
  std::mt19937_64 eng;
  explicit Gen(std::uint64_t seed) : eng(seed) {}
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(eng); }
  std::uint64_t seed() { return eng(); }
};

inline emsp::PointSetd points(Gen& g, int n, int s, double scale = 100) {
  MatrixXd c(n, s);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < s; ++k) c(i, k) = g.real(0, scale);
  return emsp::PointSetd(c);
}

/// Distances by explicit coordinate loops.
inline MatrixXd distances(const emsp::EmspInstance& inst) {
  const int n = inst.n();
  if (!inst.points()) return inst.q().matrix();
  const MatrixXd& c = inst.points()->coords();
  MatrixXd d = MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0;
      for (int k = 0; k < c.cols(); ++k) s += (c(i, k) - c(j, k)) * (c(i, k) - c(j, k));
      d(i, j) = std::sqrt(s);
    }
  return d;
}

inline double pair_sum(const MatrixXd& d, const std::vector<int>& chosen) {
  double s = 0;
  for (std::size_t a = 0; a < chosen.size(); ++a)
    for (std::size_t b = a + 1; b < chosen.size(); ++b) s += d(chosen[a], chosen[b]);
  return s;
}

struct Exhaustive {
  bool feasible = false;
  double best = 0;
  std::vector<VectorXd> optima;  // selection vectors within 1e-9 relative of best
  std::int64_t feasible_count = 0;
};

inline bool leq(double a, double b) { return a <= b + 1e-9 * (1 + std::abs(b)); }

/// Feasibility of one selection, straight from the block parameters.
inline bool selection_feasible(const emsp::EmspInstance& inst, const MatrixXd& d,
                               const std::vector<int>& chosen) {
  const int n = inst.n();
  std::vector<char> in(n, 0);
  for (int i : chosen) in[i] = 1;
  for (const auto& block : inst.blocks()) {
    if (const auto* b = std::get_if<emsp::KnapsackBlock>(&block)) {
      double w = 0;
      for (int i : chosen) w += b->weights[i];
      if (!leq(w, b->capacity)) return false;
    } else if (const auto* b = std::get_if<emsp::CardinalityBlock>(&block)) {
      const int k = static_cast<int>(chosen.size());
      if (b->sense == emsp::Sense::eq ? k != b->p : k > b->p) return false;
    } else if (const auto* b = std::get_if<emsp::GdpFixedBlock>(&block)) {
      double cap = 0, cost = 0;
      for (int i : chosen) {
        cap += b->capacity[i];
        cost += b->fixed_cost[i];
      }
      if (!leq(b->min_capacity, cap) || !leq(cost, b->budget)) return false;
    } else if (const auto* b = std::get_if<emsp::GdpVariableBlock>(&block)) {
      // Integer units t_i <= c_i, cheapest variable cost first.
      double cost = 0;
      for (int i : chosen) cost += b->fixed_cost[i];
      std::vector<int> order = chosen;
      std::sort(order.begin(), order.end(),
                [&](int a, int c) { return b->variable_cost[a] < b->variable_cost[c]; });
      double need = std::ceil(b->min_capacity - 1e-9);
      for (int i : order) {
        const double take = std::max(0.0, std::min(std::floor(b->capacity[i] + 1e-9), need));
        cost += take * b->variable_cost[i];
        need -= take;
      }
      if (need > 0 || !leq(cost, b->budget)) return false;
    } else if (const auto* b = std::get_if<emsp::ConflictBlock>(&block)) {
      for (int i = 0; i < n; ++i) {
        int members = 0, picked = 0;
        for (int j = 0; j < n; ++j)
          if (d(i, j) < b->delta) {
            ++members;
            picked += in[j];
          }
        if (members >= 2 && picked > 1) return false;
      }
    } else if (const auto* b = std::get_if<emsp::RowBlock>(&block)) {
      double a = 0;
      for (const auto& t : b->row.terms) {
        if (t.var >= n) throw std::invalid_argument("oracle handles selection-only rows");
        a += t.coef * in[t.var];
      }
      const double r = b->row.rhs;
      if (b->row.sense == emsp::Sense::le && !leq(a, r)) return false;
      if (b->row.sense == emsp::Sense::ge && !leq(r, a)) return false;
      if (b->row.sense == emsp::Sense::eq && !(leq(a, r) && leq(r, a))) return false;
    }
  }
  return !chosen.empty();
}

inline Exhaustive exhaustive(const emsp::EmspInstance& inst) {
  const int n = inst.n();
  if (n > 20) throw std::length_error("exhaustive oracle limited to n <= 20");
  const MatrixXd d = distances(inst);
  Exhaustive out;
  std::vector<std::pair<double, std::uint32_t>> values;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::vector<int> chosen;
    for (int i = 0; i < n; ++i)
      if (mask >> i & 1u) chosen.push_back(i);
    if (!selection_feasible(inst, d, chosen)) continue;
    ++out.feasible_count;
    values.push_back({pair_sum(d, chosen), mask});
  }
  if (values.empty()) return out;
  out.feasible = true;
  for (const auto& v : values) out.best = std::max(out.best, v.first);
  for (const auto& [v, mask] : values)
    if (v >= out.best - 1e-9 * (1 + out.best)) {
      VectorXd x = VectorXd::Zero(n);
      for (int i = 0; i < n; ++i) x[i] = mask >> i & 1u;
      out.optima.push_back(x);
    }
  return out;
}

inline bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

/// Spread of generator settings across the four families, n in [6, 14].
inline emsp::GeneratorSpec mixed_spec(int index, Gen& g) {
  static const emsp::Family fams[] = {emsp::Family::cdp, emsp::Family::gdp_f, emsp::Family::gdp_v,
                                      emsp::Family::blmsdp};
  static const int dims[] = {1, 2, 10};
  emsp::GeneratorSpec s;
  s.family = fams[index % 4];
  s.n = g.integer(6, 14);
  s.coords = dims[g.integer(0, 2)];
  s.ratio = g.coin() ? 0.2 : 0.3;
  s.phi = g.coin() ? 0.5 : 0.6;
  s.p = g.integer(2, s.n / 2);
  s.delta = g.coin() ? 0.0 : g.real(5, 30);
  s.seed = g.seed();
  return s;
}

// --- small MILPs ------------------------------------------------------------

/// Random pure-integer model: up to 12 binaries plus up to two integers in
/// [-2, 3], integer data, 1 to 6 rows.
inline emsp::MilpModel random_milp(Gen& g) {
  emsp::MilpModel m;
  const int nb = g.integer(1, 12);
  const int ni = nb <= 10 ? g.integer(0, 2) : 0;
  for (int j = 0; j < nb; ++j) m.add_variable(emsp::VariableDecl::binary("b" + std::to_string(j)));
  for (int j = 0; j < ni; ++j) m.add_variable(emsp::VariableDecl::integer("z" + std::to_string(j), -2, 3));
  const int n = nb + ni;
  for (int j = 0; j < n; ++j)
    if (g.coin(0.9)) m.objective.push_back({j, static_cast<double>(g.integer(-10, 10))});
  const int rows = g.integer(1, 6);
  for (int r = 0; r < rows; ++r) {
    emsp::LinearConstraint c;
    double lo = 0, hi = 0;
    for (int j = 0; j < n; ++j)
      if (g.coin(0.6)) {
        const double a = g.integer(-5, 5);
        if (a == 0) continue;
        c.terms.push_back({j, a});
        const double vlo = m.variables[j].lower, vhi = m.variables[j].upper;
        lo += std::min(a * vlo, a * vhi);
        hi += std::max(a * vlo, a * vhi);
      }
    if (c.terms.empty()) c.terms.push_back({0, 1.0}), hi = std::max(hi, 1.0);
    const int kind = g.integer(0, 5);
    c.sense = kind < 3 ? emsp::Sense::le : kind < 5 ? emsp::Sense::ge : emsp::Sense::eq;
    c.rhs = std::round(g.real(lo - 1, hi + 1));
    m.constraints.push_back(c);
  }
  return m;
}

struct Enumerated {
  bool feasible = false;
  double best = -std::numeric_limits<double>::infinity();
};

inline Enumerated enumerate_milp(const emsp::MilpModel& m) {
  const int n = m.num_variables();
  std::vector<int> lo(n), hi(n), v(n);
  for (int j = 0; j < n; ++j) {
    lo[j] = static_cast<int>(m.variables[j].lower);
    hi[j] = static_cast<int>(m.variables[j].upper);
    v[j] = lo[j];
  }
  Enumerated out;
  VectorXd x(n);
  while (true) {
    for (int j = 0; j < n; ++j) x[j] = v[j];
    bool ok = true;
    for (const auto& c : m.constraints) {
      double a = 0;
      for (const auto& t : c.terms) a += t.coef * x[t.var];
      ok = c.sense == emsp::Sense::le ? a <= c.rhs : c.sense == emsp::Sense::ge ? a >= c.rhs : a == c.rhs;
      if (!ok) break;
    }
    if (ok) {
      double obj = m.objective_offset;
      for (const auto& t : m.objective) obj += t.coef * x[t.var];
      out.feasible = true;
      out.best = std::max(out.best, obj);
    }
    int k = 0;
    while (k < n && v[k] == hi[k]) v[k] = lo[k], ++k;
    if (k == n) break;
    ++v[k];
  }
  return out;
}

/// Optimality conditions of max c'x s.t. row bounds and column bounds, checked
/// from the primal values and the reported multipliers y (reduced costs
/// recomputed here as c - A'y).
inline bool lp_kkt_holds(const emsp::MilpModel& m, const emsp::LpSolution& s, double tol = 1e-6) {
  const int n = m.num_variables();
  if (s.values.size() < n || s.row_duals.size() != static_cast<Index>(m.constraints.size()))
    return false;
  VectorXd c = VectorXd::Zero(n);
  for (const auto& t : m.objective) c[t.var] += t.coef;
  VectorXd r = c;
  for (std::size_t i = 0; i < m.constraints.size(); ++i) {
    const auto& row = m.constraints[i];
    const double y = s.row_duals[i];
    double a = 0;
    for (const auto& t : row.terms) {
      a += t.coef * s.values[t.var];
      r[t.var] -= y * t.coef;
    }
    const double slack = tol * (1 + std::abs(row.rhs));
    switch (row.sense) {
      case emsp::Sense::le:
        if (a > row.rhs + slack || y < -tol) return false;
        if (a < row.rhs - slack && std::abs(y) > tol) return false;
        break;
      case emsp::Sense::ge:
        if (a < row.rhs - slack || y > tol) return false;
        if (a > row.rhs + slack && std::abs(y) > tol) return false;
        break;
      case emsp::Sense::eq:
        if (std::abs(a - row.rhs) > slack) return false;
        break;
    }
  }
  for (int j = 0; j < n; ++j) {
    const double x = s.values[j], l = m.variables[j].lower, u = m.variables[j].upper;
    if (x < l - tol || x > u + tol) return false;
    const bool at_l = std::abs(x - l) <= tol, at_u = std::abs(x - u) <= tol;
    // Max sense: increasing x must not help unless x is at its upper bound.
    if (r[j] > tol && !at_u) return false;
    if (r[j] < -tol && !at_l) return false;
  }
  double primal = m.objective_offset;
  for (const auto& t : m.objective) primal += t.coef * s.values[t.var];
  return std::abs(primal - s.objective_value) <= tol * (1 + std::abs(primal));
}

}  // namespace testing_support
