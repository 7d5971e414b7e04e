#include "emsp/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace emsp {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

EmspInstance::EmspInstance(std::string name, PointSetd points, std::vector<ConstraintBlock> blocks)
    : name_(std::move(name)),
      points_(std::move(points)),
      q_(build_edm(*points_)),
      source_(DistanceSource::computed),
      blocks_(std::move(blocks)) {
  expand_blocks();
}

EmspInstance::EmspInstance(std::string name, std::optional<PointSetd> points, DistanceMatrixd q,
                           std::vector<ConstraintBlock> blocks)
    : name_(std::move(name)),
      points_(std::move(points)),
      q_(std::move(q)),
      source_(DistanceSource::read),
      blocks_(std::move(blocks)) {
  if (points_ && points_->size() != q_.size())
    throw std::invalid_argument("point count does not match distance matrix size");
  expand_blocks();
}

LinearConstraint nonzero_selection_row(int n) { return cardinality_row(n, Sense::ge, 1); }

LinearConstraint cardinality_row(int n, Sense sense, double rhs) {
  LinearConstraint c;
  c.terms.reserve(n);
  for (int i = 0; i < n; ++i) c.terms.push_back({i, 1.0});
  c.sense = sense;
  c.rhs = rhs;
  return c;
}

void EmspInstance::expand_blocks() {
  const int n = this->n();
  if (n < 1) throw std::invalid_argument("instance needs at least one point");
  variables_.clear();
  constraints_.clear();
  struct GdpvRows {
    const GdpVariableBlock* block;
    int first_var;
    std::size_t first_row;  // n link rows, then the capacity row
  };
  std::vector<GdpvRows> gdpv;
  for (int i = 0; i < n; ++i) variables_.push_back(VariableDecl::binary("x" + std::to_string(i + 1)));

  auto require_len = [n](const std::vector<double>& v, const char* what) {
    if (static_cast<int>(v.size()) != n)
      throw std::invalid_argument(std::string(what) + " must have one entry per point");
  };

  for (const auto& block : blocks_) {
    std::visit(
        overloaded{
            [&](const KnapsackBlock& b) {
              require_len(b.weights, "knapsack weights");
              LinearConstraint c{{}, Sense::le, b.capacity};
              for (int i = 0; i < n; ++i) c.terms.push_back({i, b.weights[i]});
              constraints_.push_back(std::move(c));
            },
            [&](const CardinalityBlock& b) {
              constraints_.push_back(cardinality_row(n, b.sense, b.p));
            },
            [&](const GdpFixedBlock& b) {
              require_len(b.capacity, "capacities");
              require_len(b.fixed_cost, "fixed costs");
              LinearConstraint cap{{}, Sense::ge, b.min_capacity};
              LinearConstraint cost{{}, Sense::le, b.budget};
              for (int i = 0; i < n; ++i) {
                cap.terms.push_back({i, b.capacity[i]});
                cost.terms.push_back({i, b.fixed_cost[i]});
              }
              constraints_.push_back(std::move(cap));
              constraints_.push_back(std::move(cost));
            },
            [&](const GdpVariableBlock& b) {
              require_len(b.capacity, "capacities");
              require_len(b.fixed_cost, "fixed costs");
              require_len(b.variable_cost, "variable costs");
              const int first = static_cast<int>(variables_.size());
              gdpv.push_back({&b, first, constraints_.size()});
              for (int i = 0; i < n; ++i)
                variables_.push_back(
                    VariableDecl::integer("t" + std::to_string(i + 1), 0, b.capacity[i]));
              LinearConstraint cap{{}, Sense::ge, b.min_capacity};
              LinearConstraint cost{{}, Sense::le, b.budget};
              for (int i = 0; i < n; ++i) {
                constraints_.push_back(
                    LinearConstraint{{{i, -b.capacity[i]}, {first + i, 1.0}}, Sense::le, 0.0});
                cap.terms.push_back({first + i, 1.0});
                cost.terms.push_back({i, b.fixed_cost[i]});
                cost.terms.push_back({first + i, b.variable_cost[i]});
              }
              constraints_.push_back(std::move(cap));
              constraints_.push_back(std::move(cost));
            },
            [&](const ConflictBlock& b) {
              for (int i = 0; i < n; ++i) {
                LinearConstraint c{{}, Sense::le, 1.0};
                for (int j = 0; j < n; ++j)
                  if (q_(i, j) < b.delta) c.terms.push_back({j, 1.0});
                if (c.terms.size() >= 2) constraints_.push_back(std::move(c));
              }
            },
            [&](const RowBlock&) {},
        },
        block);
  }
  // Rows last so they may reference any auxiliary variable.
  for (const auto& block : blocks_)
    if (const auto* r = std::get_if<RowBlock>(&block)) {
      for (const auto& t : r->row.terms)
        if (t.var < 0 || t.var >= num_variables())
          throw std::invalid_argument("row references unknown variable index " +
                                      std::to_string(t.var));
      constraints_.push_back(r->row);
    }

  solver_variables_ = variables_;
  solver_constraints_ = constraints_;
  const bool rows_touch_aux = std::any_of(blocks_.begin(), blocks_.end(), [n](const ConstraintBlock& b) {
    const auto* r = std::get_if<RowBlock>(&b);
    return r && std::any_of(r->row.terms.begin(), r->row.terms.end(),
                            [n](const Term& t) { return t.var >= n; });
  });
  if (rows_touch_aux) return;
  for (const auto& g : gdpv) {
    for (int i = 0; i < n; ++i) {
      const double cap = std::floor(g.block->capacity[i] + 1e-9);
      auto& v = solver_variables_[g.first_var + i];
      v.kind = VarKind::continuous;
      v.upper = cap;
      solver_constraints_[g.first_row + i].terms[0].coef = -cap;
    }
    auto& total = solver_constraints_[g.first_row + n];
    total.rhs = std::ceil(total.rhs - 1e-9);
  }
}

std::string EmspInstance::family() const {
  bool knap = false, card = false, gdpf = false, gdpv = false, conflict = false, row = false;
  for (const auto& b : blocks_)
    std::visit(overloaded{[&](const KnapsackBlock&) { knap = true; },
                          [&](const CardinalityBlock&) { card = true; },
                          [&](const GdpFixedBlock&) { gdpf = true; },
                          [&](const GdpVariableBlock&) { gdpv = true; },
                          [&](const ConflictBlock&) { conflict = true; },
                          [&](const RowBlock&) { row = true; }},
               b);
  const int kinds = knap + card + gdpf + gdpv + conflict + row;
  if (knap && kinds == 1) return "cdp";
  if (gdpf && kinds == 1) return "gdp_f";
  if (gdpv && kinds == 1) return "gdp_v";
  if (card && !knap && !gdpf && !gdpv && !row) return "blmsdp";
  return "custom";
}

std::vector<std::string> validate(const EmspInstance& inst) {
  std::vector<std::string> out;
  const int n = inst.n();
  for (auto& s : inst.q().invariant_violations()) out.push_back(std::move(s));
  if (inst.points()) {
    const DistanceMatrixd expect = build_edm(*inst.points());
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (std::abs(expect(i, j) - inst.q()(i, j)) > 1e-9 * (1 + expect(i, j))) {
          out.push_back("matrix entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                        ") inconsistent with coordinates");
          i = n;
          break;
        }
  }

  for (const auto& v : inst.variables()) {
    if (!(v.lower <= v.upper)) out.push_back("variable " + v.name + " has lower > upper");
    if (v.kind == VarKind::binary && (v.lower != 0 || v.upper != 1))
      out.push_back("binary variable " + v.name + " must have bounds [0,1]");
    if (!std::isfinite(v.lower) || !std::isfinite(v.upper))
      out.push_back("warning: variable " + v.name + " is unbounded; the feasible set must be bounded");
  }
  for (std::size_t r = 0; r < inst.constraints().size(); ++r) {
    const auto& c = inst.constraints()[r];
    const bool any_nonzero =
        std::any_of(c.terms.begin(), c.terms.end(), [](const Term& t) { return t.coef != 0; });
    if (!any_nonzero) out.push_back("row " + std::to_string(r + 1) + " has no nonzero coefficient");
    const bool finite =
        std::isfinite(c.rhs) &&
        std::all_of(c.terms.begin(), c.terms.end(), [](const Term& t) { return std::isfinite(t.coef); });
    if (!finite) out.push_back("row " + std::to_string(r + 1) + " has non-finite data");
  }

  // Cheap scans that certify an empty feasible set for the structured blocks.
  bool empty = false;
  auto min_of = [](const std::vector<double>& v) { return *std::min_element(v.begin(), v.end()); };
  auto sum_of = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); };
  for (const auto& block : inst.blocks()) {
    std::visit(overloaded{
                   [&](const KnapsackBlock& b) { empty = empty || b.capacity < min_of(b.weights); },
                   [&](const CardinalityBlock& b) {
                     empty = empty || b.p < 1 || (b.sense == Sense::eq && b.p > n);
                   },
                   [&](const GdpFixedBlock& b) {
                     empty = empty || sum_of(b.capacity) < b.min_capacity ||
                             min_of(b.fixed_cost) > b.budget;
                   },
                   [&](const GdpVariableBlock& b) {
                     empty = empty || sum_of(b.capacity) < b.min_capacity ||
                             min_of(b.fixed_cost) > b.budget;
                   },
                   [&](const ConflictBlock&) {},
                   [&](const RowBlock&) {},
               },
               block);
  }
  if (empty) out.push_back("no nonzero selection is feasible");
  return out;
}

bool is_feasible(const EmspInstance& inst, const Eigen::VectorXd& assignment, double tol) {
  if (assignment.size() != inst.num_variables())
    throw std::invalid_argument("assignment has " + std::to_string(assignment.size()) +
                                " values, instance has " + std::to_string(inst.num_variables()) +
                                " variables");
  for (int j = 0; j < inst.num_variables(); ++j) {
    const auto& v = inst.variables()[j];
    const double x = assignment[j];
    if (x < v.lower - tol || x > v.upper + tol) return false;
    if (v.is_integral() && std::abs(x - std::round(x)) > tol) return false;
  }
  for (const auto& c : inst.constraints())
    if (!c.satisfied(assignment, tol)) return false;
  return assignment.head(inst.n()).sum() >= 1 - tol;
}

MilpModel base_model(const EmspInstance& inst) {
  MilpModel m;
  m.variables = inst.solver_variables();
  m.constraints = inst.solver_constraints();
  m.constraints.push_back(nonzero_selection_row(inst.n()));
  return m;
}

MilpModel max_cardinality_model(const EmspInstance& inst) {
  MilpModel m = base_model(inst);
  for (int i = 0; i < inst.n(); ++i) m.objective.push_back({i, 1.0});
  return m;
}

}  // namespace emsp
