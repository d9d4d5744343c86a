#include <doctest.h>

#include "igt/games.hpp"
#include "igt/instance.hpp"
#include "igt/inverse_planner.hpp"

using namespace igt;

TEST_CASE("quadratic toy payoffs and gradients") {
  const ParametricGame g = quadratic_toy(2);
  const Vec theta = Vec::Constant(1, 1.0);
  Vec x = Vec::Zero(2);

  SUBCASE("exploitability is zero at the equilibrium") {
    Vec at_eq = Vec::Constant(2, 0.5);
    const Vec th = Vec::Constant(1, 0.5);
    CHECK(exploitability(g, th, at_eq).value == doctest::Approx(0.0));
  }
  SUBCASE("hand-differentiated theta gradient") {
    CHECK(g.grad_payoff_theta(x, theta, 0)[0] == doctest::Approx(-2.0));
  }
  SUBCASE("gradients match finite differences") {
    Rng rng(3);
    CHECK(max_gradient_error(g, rng, 100) < 1e-4);
  }
}

TEST_CASE("random matrix game is certified zero-sum with an interior NE") {
  Rng rng(11);
  const GameInstance inst = sample_instance(Family::RandomMatrix, rng);
  CHECK(certify_instance(inst) <= 1e-6);

  const ParametricGame g = inst.make_game(ParamMode::Direct);
  const Vec u = g.payoff(inst.x_direct, inst.theta_direct);
  CHECK(u[0] + u[1] == doctest::Approx(0.0));

  Rng grng(5);
  CHECK(max_gradient_error(g, grng, 50) < 1e-4);
}

TEST_CASE("instances serialize to JSON and back bit-exactly") {
  Rng rng(2024);
  for (Family f : {Family::FisherLinear, Family::FisherCobbDouglas, Family::FisherLeontief,
                   Family::Cournot, Family::Bertrand, Family::QuadraticToy,
                   Family::RandomMatrix}) {
    Rng sub = rng.substream(static_cast<std::uint64_t>(f));
    const GameInstance inst = sample_instance(f, sub);
    const GameInstance back = GameInstance::from_json(inst.to_json());
    const ParamMode mode = inst.supported_modes().front();
    CHECK(inst.true_params(mode) == back.true_params(mode));
    CHECK(inst.observed().flat == back.observed().flat);
    CHECK(inst.to_json() == back.to_json());
  }
}
