#include "emsp/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace emsp {

MilpModel glover_model(const EmspInstance& inst) {
  const int n = inst.n();
  MilpModel m = base_model(inst);
  const auto& q = inst.q();
  for (int i = 0; i + 1 < n; ++i) {
    double tail = 0;
    for (int j = i + 1; j < n; ++j) tail += q(i, j);
    const int w = m.add_variable(VariableDecl::continuous("w" + std::to_string(i + 1), 0, tail));
    m.objective.push_back({w, 1.0});
    // w_i <= x_i * sum_{j>i} q_ij
    m.add_constraint({{{w, 1.0}, {i, -tail}}, Sense::le, 0.0});
    // w_i <= sum_{j>i} q_ij x_j
    LinearConstraint link{{{w, 1.0}}, Sense::le, 0.0};
    for (int j = i + 1; j < n; ++j)
      if (q(i, j) != 0) link.terms.push_back({j, -q(i, j)});
    m.add_constraint(std::move(link));
  }
  return m;
}

namespace {

/// Per-selection feasibility of the auxiliary variables.
class AuxResolver {
 public:
  explicit AuxResolver(const EmspInstance& inst) : inst_(inst), n_(inst.n()) {
    int first = n_;
    for (const auto& b : inst.blocks())
      if (const auto* v = std::get_if<GdpVariableBlock>(&b)) {
        Gdpv g{v, first, {}};
        g.order.resize(n_);
        std::iota(g.order.begin(), g.order.end(), 0);
        std::stable_sort(g.order.begin(), g.order.end(), [v](int a, int c) {
          return v->variable_cost[a] < v->variable_cost[c];
        });
        gdpv_.push_back(std::move(g));
        first += n_;
      }
    for (const auto& c : inst.constraints()) {
      const bool aux = std::any_of(c.terms.begin(), c.terms.end(),
                                   [&](const Term& t) { return t.var >= n_; });
      if (aux) aux_rows_.push_back(&c);
    }
    generic_ = false;
    for (const auto& b : inst.blocks())
      if (const auto* r = std::get_if<RowBlock>(&b))
        generic_ = generic_ || std::any_of(r->row.terms.begin(), r->row.terms.end(),
                                           [&](const Term& t) { return t.var >= n_; });
    if (generic_) prepare_generic();
  }

  bool feasible(const Eigen::VectorXd& x) const {
    if (inst_.num_variables() == n_) return true;
    if (generic_) return enumerate(x);
    return std::all_of(gdpv_.begin(), gdpv_.end(), [&](const Gdpv& g) { return greedy(g, x); });
  }

 private:
  struct Gdpv {
    const GdpVariableBlock* block;
    int first;
    std::vector<int> order;  // by ascending variable cost
  };

  // Cheapest way to meet sum t >= B with integer t_i in [0, c_i x_i] is to fill
  // the lowest variable costs first.
  static bool greedy(const Gdpv& g, const Eigen::VectorXd& x) {
    const auto& b = *g.block;
    double need = std::ceil(b.min_capacity - 1e-9);
    double cost = 0;
    for (Index i = 0; i < x.size(); ++i)
      if (x[i] > 0.5) cost += b.fixed_cost[i];
    for (int i : g.order) {
      if (need <= 0) break;
      if (x[i] < 0.5) continue;
      const double take = std::min(std::floor(b.capacity[i] + 1e-9), need);
      cost += b.variable_cost[i] * take;
      need -= take;
    }
    if (need > 0) return false;
    return cost <= b.budget + 1e-9 * (1 + std::abs(b.budget));
  }

  void prepare_generic() {
    std::int64_t combos = 1;
    for (int j = n_; j < inst_.num_variables(); ++j) {
      const auto& v = inst_.variables()[j];
      if (!v.is_integral() || !std::isfinite(v.lower) || !std::isfinite(v.upper))
        throw std::invalid_argument("brute force needs bounded integer auxiliary variables");
      combos *= static_cast<std::int64_t>(std::floor(v.upper) - std::ceil(v.lower) + 1);
      if (combos > 1'000'000) throw std::length_error("auxiliary ranges too large to enumerate");
    }
  }

  bool enumerate(const Eigen::VectorXd& x) const {
    const int total = inst_.num_variables();
    Eigen::VectorXd full = Eigen::VectorXd::Zero(total);
    full.head(n_) = x;
    std::vector<double> lo, hi;
    for (int j = n_; j < total; ++j) {
      lo.push_back(std::ceil(inst_.variables()[j].lower));
      hi.push_back(std::floor(inst_.variables()[j].upper));
      full[j] = lo.back();
    }
    while (true) {
      if (std::all_of(aux_rows_.begin(), aux_rows_.end(),
                      [&](const LinearConstraint* c) { return c->satisfied(full, 1e-9); }))
        return true;
      int k = 0;
      while (k < total - n_ && full[n_ + k] >= hi[k]) {
        full[n_ + k] = lo[k];
        ++k;
      }
      if (k == total - n_) return false;
      full[n_ + k] += 1;
    }
  }

  const EmspInstance& inst_;
  int n_;
  std::vector<Gdpv> gdpv_;
  std::vector<const LinearConstraint*> aux_rows_;
  bool generic_ = false;
};

}  // namespace

BruteForceResult brute_force(const EmspInstance& inst) {
  const int n = inst.n();
  if (n > kBruteForceMaxN)
    throw std::length_error("brute force limited to n <= " + std::to_string(kBruteForceMaxN));

  // Rows over selection variables only, densified for incremental updates.
  std::vector<const LinearConstraint*> x_rows;
  for (const auto& c : inst.constraints())
    if (std::all_of(c.terms.begin(), c.terms.end(), [&](const Term& t) { return t.var < n; }))
      x_rows.push_back(&c);
  const int r = static_cast<int>(x_rows.size());
  Eigen::MatrixXd coef = Eigen::MatrixXd::Zero(r, n);
  for (int k = 0; k < r; ++k)
    for (const auto& t : x_rows[k]->terms) coef(k, t.var) += t.coef;

  const AuxResolver aux(inst);
  const auto& q = inst.q().matrix();

  BruteForceResult out;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd row_sum = Eigen::VectorXd::Zero(n);  // sum_{j in S} q_ij
  Eigen::VectorXd act = Eigen::VectorXd::Zero(r);
  double f = 0;
  double best = -kInf;
  const std::uint64_t count = std::uint64_t{1} << n;

  for (std::uint64_t g = 1; g < count; ++g) {
    const int i = __builtin_ctzll(g);
    if (x[i] == 0) {
      f += row_sum[i];
      x[i] = 1;
      row_sum += q.col(i);
      act += coef.col(i);
    } else {
      x[i] = 0;
      row_sum -= q.col(i);
      f -= row_sum[i];
      act -= coef.col(i);
    }
    bool ok = true;
    for (int k = 0; k < r && ok; ++k) {
      const auto& c = *x_rows[k];
      const double slack = 1e-9 * (1 + std::abs(c.rhs));
      switch (c.sense) {
        case Sense::le: ok = act[k] <= c.rhs + slack; break;
        case Sense::ge: ok = act[k] >= c.rhs - slack; break;
        case Sense::eq: ok = std::abs(act[k] - c.rhs) <= slack; break;
      }
    }
    if (!ok || !aux.feasible(x)) continue;
    ++out.enumerated;
    // The incremental value can drift; recompute exactly near the incumbent.
    if (f < best - 1e-6 * (1 + std::abs(best))) continue;
    const double exact = emsp::objective(inst.q(), x);
    if (exact > best + 1e-12 * (1 + std::abs(best))) {
      if (exact > best) best = exact;
      out.best_solutions.erase(
          std::remove_if(out.best_solutions.begin(), out.best_solutions.end(),
                         [&](const Eigen::VectorXd& s) {
                           return emsp::objective(inst.q(), s) < best - 1e-12 * (1 + std::abs(best));
                         }),
          out.best_solutions.end());
      out.best_solutions.push_back(x);
    } else if (exact >= best - 1e-12 * (1 + std::abs(best))) {
      best = std::max(best, exact);
      out.best_solutions.push_back(x);
    }
  }
  out.feasible = out.enumerated > 0;
  out.best_value = out.feasible ? best : 0;
  return out;
}

}  // namespace emsp
