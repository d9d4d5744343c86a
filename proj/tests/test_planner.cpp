#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "igt/instance.hpp"
#include "igt/inverse_planner.hpp"

using namespace igt;

namespace {

Vec v(std::initializer_list<double> vals) {
  Vec out(static_cast<Index>(vals.size()));
  Index i = 0;
  for (double x : vals) out[i++] = x;
  return out;
}

ParametricGame constant_game(Index n_players) {
  ParametricGame g;
  for (Index i = 0; i < n_players; ++i) g.strategy_spaces.push_back(Space::box(1, -1.0, 1.0));
  g.param_space = Space::box(1, -1.0, 1.0);
  finalize_offsets(g);
  g.payoff = [n_players](const Vec&, const Vec&) { return Vec::Constant(n_players, 3.0); };
  g.grad_payoff_x = [](const Vec&, const Vec&, Index) { return Vec::Zero(1); };
  g.grad_payoff_theta = [](const Vec&, const Vec&, Index) { return Vec::Zero(1); };
  g.br_method = BestResponseMethod::GradientAscent;
  return g;
}

}  // namespace

TEST_CASE("cumulative regret identities") {
  const ParametricGame toy = quadratic_toy(2);
  const Vec theta = v({1.0});
  SUBCASE("deviation equal to observed gives zero") {
    CHECK(cumulative_regret(toy, theta, v({0.3, -0.2}), v({0.3, -0.2})) ==
          doctest::Approx(0.0));
  }
  SUBCASE("constant game gives zero everywhere") {
    const ParametricGame c = constant_game(2);
    CHECK(cumulative_regret(c, v({0.0}), v({0.5, -0.5}), v({-1.0, 1.0})) ==
          doctest::Approx(0.0));
  }
  SUBCASE("hand-evaluated quadratic toy") {
    CHECK(cumulative_regret(toy, theta, v({0.0, 0.0}), v({1.0, 1.0})) == doctest::Approx(2.0));
  }
}

TEST_CASE("exploitability via closed-form inner max") {
  const ParametricGame toy = quadratic_toy(2);
  const Exploitability e = exploitability(toy, v({1.0}), v({0.0, 0.0}));
  CHECK(e.value == doctest::Approx(2.0));
  CHECK((e.deviation - v({1.0, 1.0})).norm() == doctest::Approx(0.0));
  CHECK(e.method == "closed_form");

  const ParametricGame c = constant_game(3);
  CHECK(exploitability(c, v({0.0}), v({0.1, 0.2, 0.3})).value == doctest::Approx(0.0));
}

TEST_CASE("average_iterates equals the arithmetic mean") {
  Mat single(1, 2);
  single << 0.25, -0.5;
  CHECK((average_iterates(single) - v({0.25, -0.5})).norm() == doctest::Approx(0.0));

  Mat two(2, 1);
  two << 0.0, 1.0;
  CHECK(average_iterates(two)[0] == doctest::Approx(0.5));

  // Long trace: batch mean equals an incremental running mean.
  Rng rng(4);
  Mat many(5000, 3);
  Vec running = Vec::Zero(3);
  for (Index t = 0; t < 5000; ++t) {
    for (Index j = 0; j < 3; ++j) many(t, j) = rng.uniform(-1.0, 1.0);
    running += (many.row(t).transpose() - running) / static_cast<double>(t + 1);
  }
  CHECK((average_iterates(many) - running).norm() < 1e-12);
}

TEST_CASE("gda on a constant game returns theta0 with a zero certificate") {
  InverseGame inv{constant_game(2), StrategyProfile{v({0.0, 0.0}), {0, 1, 2}}};
  GdaConfig cfg;
  cfg.iters = 50;
  cfg.theta0 = v({0.25});
  cfg.y0 = v({0.0, 0.0});
  const SolveTrace trace = gda_solve(inv, cfg);
  CHECK(trace.theta_bar[0] == doctest::Approx(0.25));
  CHECK(trace.certificate == doctest::Approx(0.0));
}

TEST_CASE("gda recovers the quadratic toy inverse equilibrium") {
  const ParametricGame toy = quadratic_toy(2);
  InverseGame inv{toy, toy.wrap(v({0.5, 0.5}))};
  GdaConfig cfg;
  cfg.iters = 5000;
  cfg.eta_theta = cfg.eta_y = 0.01;
  cfg.theta0 = v({-1.0});
  cfg.y0 = v({0.0, 0.0});
  const SolveTrace trace = gda_solve(inv, cfg);
  CHECK(std::abs(trace.theta_bar[0] - 0.5) < 1e-2);
  CHECK(trace.certificate < 1e-3);
}

TEST_CASE("solves are deterministic and feasible throughout") {
  Rng rng(12);
  const GameInstance inst = sample_instance(Family::FisherLinear, rng);
  const ParametricGame game = inst.make_game(ParamMode::BudgetsOnly);
  InverseGame inv{game, inst.observed()};
  GdaConfig cfg;
  cfg.iters = 400;
  cfg.trace_stride = 50;
  cfg.theta0 = project(game.param_space, Vec::Zero(game.param_space.dim()));
  cfg.y0 = inv.observed.flat;

  const SolveTrace a = gda_solve(inv, cfg);
  const SolveTrace b = gda_solve(inv, cfg);
  CHECK(a.theta_bar == b.theta_bar);
  CHECK(a.f_values == b.f_values);
  CHECK(a.certificate == b.certificate);

  const Space joint = game.joint_strategy_space();
  for (Index r = 0; r < a.thetas.rows(); ++r) {
    CHECK(game.param_space.contains(a.thetas.row(r).transpose(), 1e-9));
    CHECK(joint.contains(a.ys.row(r).transpose(), 1e-9));
  }
}

TEST_CASE("trace export writes the expected columns") {
  const ParametricGame toy = quadratic_toy(2);
  InverseGame inv{toy, toy.wrap(v({0.5, 0.5}))};
  GdaConfig cfg;
  cfg.iters = 20;
  cfg.trace_stride = 5;
  cfg.theta0 = v({0.0});
  cfg.y0 = v({0.0, 0.0});
  const SolveTrace trace = gda_solve(inv, cfg);

  const std::string path = "trace_test.csv";
  write_trace_csv(trace, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "iter,f_value,theta0,exploitability_running");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == static_cast<int>(trace.trace_iters.size()));
  std::remove(path.c_str());

  const std::string json = trace_summary_json(trace);
  CHECK(json.find("theta_bar") != std::string::npos);
  CHECK(json.find("wall_ms") != std::string::npos);
}
