#include <doctest.h>

#include "emsp/cutting_planes.hpp"
#include "emsp/instances.hpp"
#include "emsp/lp.hpp"
#include "support.hpp"

namespace ts = testing_support;
using emsp::LinearConstraint;
using emsp::MilpModel;
using emsp::MilpStatus;
using emsp::Sense;
using emsp::VariableDecl;
using Eigen::VectorXd;

namespace {

MilpModel knapsack() {
  MilpModel m;
  for (int j = 0; j < 3; ++j) m.add_variable(VariableDecl::binary("x" + std::to_string(j)));
  m.objective = {{0, 3}, {1, 4}, {2, 5}};
  m.add_constraint({{{0, 3}, {1, 4}, {2, 5}}, Sense::le, 8});
  return m;
}

}  // namespace

TEST_CASE("small knapsack") {
  const auto s = emsp::solve_milp(knapsack());
  REQUIRE(s.status == MilpStatus::optimal);
  CHECK(*s.objective_value == doctest::Approx(8.0));
  CHECK((*s.incumbent)[0] == doctest::Approx(1.0));
  CHECK((*s.incumbent)[2] == doctest::Approx(1.0));
  CHECK(s.best_bound == doctest::Approx(8.0));
}

TEST_CASE("accepting callback changes nothing") {
  ts::Gen g(31);
  for (int trial = 0; trial < 50; ++trial) {
    const auto m = ts::random_milp(g);
    int calls = 0;
    const auto plain = emsp::solve_milp(m);
    const auto with = emsp::solve_milp(m, [&](const VectorXd&, double) {
      ++calls;
      return std::vector<LinearConstraint>{};
    });
    REQUIRE(plain.status == with.status);
    if (plain.status == MilpStatus::optimal) {
      CHECK(*plain.objective_value == *with.objective_value);
      CHECK(calls > 0);
    }
  }
}

TEST_CASE("lazy rows are enforced") {
  MilpModel m;
  m.add_variable(VariableDecl::binary("a"));
  m.add_variable(VariableDecl::binary("b"));
  m.objective = {{0, 1}, {1, 1}};
  const auto s = emsp::solve_milp(m, [](const VectorXd& x, double) {
    std::vector<LinearConstraint> rows;
    if (x[0] + x[1] > 1.5) rows.push_back({{{0, 1}, {1, 1}}, Sense::le, 1});
    return rows;
  });
  REQUIRE(s.status == MilpStatus::optimal);
  CHECK(*s.objective_value == doctest::Approx(1.0));
  CHECK(s.lazy_cuts_added >= 1);
}

TEST_CASE("random models match enumeration") {
  ts::Gen g(32);
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = ts::random_milp(g);
    const auto ref = ts::enumerate_milp(m);
    const auto s = emsp::solve_milp(m);
    if (!ref.feasible) {
      CHECK(s.status == MilpStatus::infeasible);
      continue;
    }
    REQUIRE(s.status == MilpStatus::optimal);
    CHECK(*s.objective_value == doctest::Approx(ref.best).epsilon(1e-9));
    for (const auto& c : m.constraints) CHECK(c.satisfied(*s.incumbent, 1e-6));
    CHECK(s.lp_solves == s.lp_verified_optimal + s.lp_infeasible);
  }
}

TEST_CASE("bound trace never increases") {
  ts::Gen g(33);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = emsp::solve_milp(ts::random_milp(g));
    for (std::size_t k = 1; k < s.bound_trace.size(); ++k)
      CHECK(s.bound_trace[k] <= s.bound_trace[k - 1] + 1e-9);
  }
}

TEST_CASE("limits and invalid models") {
  MilpModel m;
  for (int j = 0; j < 12; ++j) {
    m.add_variable(VariableDecl::binary("x" + std::to_string(j)));
    m.objective.push_back({j, 1.0 + 0.01 * j});
  }
  LinearConstraint r;
  for (int j = 0; j < 12; ++j) r.terms.push_back({j, 2.0});
  r.rhs = 11;
  m.add_constraint(r);
  emsp::MilpLimits lim;
  lim.node_limit = 1;
  const auto s = emsp::solve_milp(m, {}, lim);
  CHECK(s.status == MilpStatus::node_limit);
  CHECK(s.node_count == 1);

  MilpModel bad;
  bad.add_variable(VariableDecl::integer("z", 0, emsp::kInf));
  CHECK_THROWS_AS(emsp::solve_milp(bad), std::invalid_argument);
  MilpModel dangling;
  dangling.add_variable(VariableDecl::binary("x"));
  dangling.objective = {{3, 1.0}};
  CHECK_FALSE(dangling.problems().empty());
  CHECK_THROWS_AS(emsp::solve_milp(dangling), std::invalid_argument);
}

TEST_CASE("master problem matches a brute-force bound") {
  ts::Gen g(34);
  for (int trial = 0; trial < 5; ++trial) {
    emsp::GeneratorSpec spec;
    spec.family = trial % 2 ? emsp::Family::cdp : emsp::Family::blmsdp;
    spec.n = 10;
    spec.p = 4;
    spec.seed = g.seed();
    const auto inst = emsp::generate(spec);
    const Eigen::MatrixXd d = ts::distances(inst);
    emsp::CutPool pool;
    std::vector<VectorXd> ys;
    while (ys.size() < 4) {
      VectorXd y(10);
      for (int i = 0; i < 10; ++i) y[i] = g.coin() ? 1 : 0;
      if (y.sum() > 0 && pool.add(inst.q(), y, emsp::CutOrigin::integer, 0)) ys.push_back(y);
    }
    double best = -emsp::kInf;
    for (std::uint32_t mask = 1; mask < (1u << 10); ++mask) {
      std::vector<int> chosen;
      VectorXd x = VectorXd::Zero(10);
      for (int i = 0; i < 10; ++i)
        if (mask >> i & 1u) {
          chosen.push_back(i);
          x[i] = 1;
        }
      if (!ts::selection_feasible(inst, d, chosen)) continue;
      double h = emsp::kInf;
      for (const auto& y : ys) {
        const VectorXd dy = d * y;
        h = std::min(h, dy.dot(x) - 0.5 * dy.dot(y));
      }
      best = std::max(best, h);
    }
    emsp::MilpLimits lim;
    lim.relative_gap = 1e-10;
    const auto s = emsp::solve_milp(emsp::build_master(inst, pool), {}, lim);
    REQUIRE(s.status == MilpStatus::optimal);
    CHECK(*s.objective_value == doctest::Approx(best).epsilon(1e-9));
  }
}
