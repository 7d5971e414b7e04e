#include <doctest.h>

#include "emsp/baselines.hpp"
#include "emsp/cutting_planes.hpp"
#include "emsp/instances.hpp"
#include "support.hpp"

#include <cmath>

namespace ts = testing_support;
using emsp::CutOrigin;
using emsp::EmspInstance;
using emsp::PointSetd;
using emsp::SolverConfig;
using emsp::SolveStatus;
using Eigen::VectorXd;

namespace {

std::vector<SolverConfig> all_configs() {
  std::vector<SolverConfig> out;
  for (auto a : {emsp::Algorithm::repeated_ilp, emsp::Algorithm::forced_cardinality})
    for (auto m : {emsp::LpTangentMode::none, emsp::LpTangentMode::root_only,
                   emsp::LpTangentMode::all_iterations}) {
      SolverConfig c;
      c.algorithm = a;
      c.lp_tangents = m;
      out.push_back(c);
    }
  return out;
}

EmspInstance toy_cdp() {
  return EmspInstance("toy", PointSetd::from_rows({{0, 0}, {3, 4}, {6, 0}}),
                      {emsp::KnapsackBlock{8, {3, 4, 5}}});
}

}  // namespace

TEST_CASE("unconstrained triangle") {
  const EmspInstance tri("tri", PointSetd::from_rows({{0, 0}, {1, 0}, {0, 1}}), {});
  const auto r = emsp::solve(tri, SolverConfig{});
  REQUIRE(r.status == SolveStatus::optimal);
  CHECK(r.best_value == doctest::Approx(2 + std::sqrt(2.0)).epsilon(1e-12));
  CHECK(r.iterations <= 2);
  CHECK(r.best_solution.size() == 3);
  CHECK(r.best_solution.sum() == doctest::Approx(3.0));
}

TEST_CASE("small knapsack under every configuration") {
  const auto inst = toy_cdp();
  for (const auto& cfg : all_configs()) {
    CAPTURE(cfg.label());
    const auto r = emsp::solve(inst, cfg);
    REQUIRE(r.status == SolveStatus::optimal);
    CHECK(r.best_value == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(r.best_solution[0] == doctest::Approx(1.0));
    CHECK(r.best_solution[1] == doctest::Approx(0.0));
    CHECK(r.best_solution[2] == doctest::Approx(1.0));
    CHECK(r.integer_cuts + r.lp_cuts + 1 == static_cast<int>(r.cuts.size()));
  }
}

TEST_CASE("cut pool") {
  const auto inst = toy_cdp();
  emsp::CutPool pool;
  VectorXd y(3);
  y << 1, 0, 1;
  CHECK(pool.add(inst.q(), y, CutOrigin::integer, 1));
  CHECK_FALSE(pool.add(inst.q(), y, CutOrigin::lp_relaxation, 2));
  VectorXd near = y;
  near[1] = 1e-13;
  CHECK(pool.contains(near));
  CHECK(pool.size() == 1);
  y[1] = 0.5;
  CHECK(pool.add(inst.q(), y, CutOrigin::lp_relaxation, 2));
  CHECK(pool.count(CutOrigin::integer) == 1);
  CHECK(pool.count(CutOrigin::lp_relaxation) == 1);

  const auto& c = pool.cuts().front();
  CHECK(c.gradient[1] == doctest::Approx(5.0 + 5.0));
  CHECK(c.offset == doctest::Approx(-6.0));
  const auto row = emsp::cut_row(c, 3);
  VectorXd xt(4);
  xt << 1, 0, 1, 6;
  CHECK(row.satisfied(xt, 1e-12));
  xt[3] = 6.01;
  CHECK_FALSE(row.satisfied(xt, 1e-12));
}

TEST_CASE("initial cut") {
  const auto init = emsp::initial_cut(toy_cdp());
  CHECK(init.x0.sum() == doctest::Approx(2.0));
  CHECK(init.cut.origin == CutOrigin::initial);

  const EmspInstance none("none", PointSetd::from_rows({{0, 0}, {1, 1}}),
                          {emsp::KnapsackBlock{2, {3, 4}}});
  CHECK_THROWS_AS(emsp::initial_cut(none), emsp::InfeasibleInstance);
  const auto r = emsp::solve(none, SolverConfig{});
  CHECK(r.status == SolveStatus::infeasible);
  CHECK(r.best_solution.size() == 0);
  emsp::CutPool empty;
  CHECK_THROWS(emsp::build_master(none, empty));
}

TEST_CASE("LP tangent loop respects its iteration cap") {
  ts::Gen g(51);
  for (int trial = 0; trial < 6; ++trial) {
    emsp::GeneratorSpec spec;
    spec.family = trial % 2 ? emsp::Family::cdp : emsp::Family::blmsdp;
    spec.n = 20;
    spec.p = 6;
    spec.seed = g.seed();
    const auto inst = emsp::generate(spec);
    emsp::CutPool pool;
    const auto init = emsp::initial_cut(inst);
    pool.add(inst.q(), init.x0, CutOrigin::initial, 0);
    SolverConfig cfg;
    cfg.lp_tangent_max_iters = 5;
    emsp::LpTangentArgs args;
    args.incumbent_value = emsp::kInf;  // certify everything; only the cap is under test
    const int added = emsp::lp_tangent_loop(inst, pool, cfg, args);
    CHECK(added <= 5);
    CHECK(static_cast<int>(pool.size()) == added + 1);
  }
}

TEST_CASE("uncertified LP tangents are not pooled") {
  const auto inst = toy_cdp();
  emsp::CutPool pool;
  pool.add(inst.q(), emsp::initial_cut(inst).x0, CutOrigin::initial, 0);
  emsp::LpTangentArgs args;
  args.incumbent_value = -emsp::kInf;
  CHECK(emsp::lp_tangent_loop(inst, pool, SolverConfig{}, args) == 0);
  CHECK(pool.size() == 1);
}

TEST_CASE("configuration checks") {
  SolverConfig c;
  CHECK_NOTHROW(c.check());
  c.time_limit_s = 0;
  CHECK_THROWS_AS(c.check(), std::invalid_argument);
  c.time_limit_s = 10;
  c.tolerance = -1;
  CHECK_THROWS_AS(c.check(), std::invalid_argument);
  CHECK(SolverConfig{}.label() == "repeated_ilp/none");
  CHECK_THROWS_AS(emsp::solve(toy_cdp(), c), std::invalid_argument);
}

TEST_CASE("configurations agree with brute force and bounds hold") {
  ts::Gen g(52);
  for (int trial = 0; trial < 24; ++trial) {
    const auto inst = emsp::generate(ts::mixed_spec(trial, g));
    const auto ref = emsp::brute_force(inst);
    const Eigen::MatrixXd d = ts::distances(inst);
    for (const auto& cfg : all_configs()) {
      CAPTURE(cfg.label());
      CAPTURE(inst.name());
      const auto r = emsp::solve(inst, cfg);
      if (!ref.feasible) {
        CHECK(r.status == SolveStatus::infeasible);
        continue;
      }
      REQUIRE(r.status == SolveStatus::optimal);
      CHECK(ts::rel_close(r.best_value, ref.best_value, 1e-9));
      std::vector<int> chosen;
      for (int i = 0; i < inst.n(); ++i)
        if (r.best_solution[i] > 0.5) chosen.push_back(i);
      CHECK(ts::selection_feasible(inst, d, chosen));
      CHECK(ts::rel_close(ts::pair_sum(d, chosen), ref.best_value, 1e-9));
      // Every pooled cut over-estimates the optimum at an optimal selection.
      const VectorXd& xs = ref.best_solutions.front();
      for (const auto& cut : r.cuts)
        CHECK(cut.evaluate(xs.head(inst.n())) >= ref.best_value - 1e-7 * (1 + ref.best_value));
      for (const auto& b : r.bound_trace) CHECK(b.upper >= ref.best_value - 1e-7 * (1 + ref.best_value));
    }
  }
}

TEST_CASE("log sink mirrors the bound trace") {
  int calls = 0;
  emsp::SolveContext ctx;
  ctx.log = [&](const emsp::IterationLog&) { ++calls; };
  const auto r = emsp::solve(toy_cdp(), SolverConfig{}, ctx);
  CHECK(calls == static_cast<int>(r.bound_trace.size()));
}
