#include <doctest.h>

#include "igt/instance.hpp"
#include "igt/inverse_planner.hpp"
#include "igt/oligopoly.hpp"

using namespace igt;

namespace {

Vec v(std::initializer_list<double> vals) {
  Vec out(static_cast<Index>(vals.size()));
  Index i = 0;
  for (double x : vals) out[i++] = x;
  return out;
}

}  // namespace

TEST_CASE("cournot profits, equilibrium, and best responses") {
  CHECK((cournot_payoffs(v({3.0, 3.0}), 1.0, 10.0, -1.0) - v({9.0, 9.0})).norm() ==
        doctest::Approx(0.0));
  CHECK(cournot_nash_quantity(2, 1.0, 10.0, -1.0) == doctest::Approx(3.0));
  // Production is never profitable at c = a.
  CHECK(cournot_nash_quantity(2, 10.0, 10.0, -1.0) == doctest::Approx(0.0));

  const ParametricGame g = cournot_game(2, 10.0, -1.0);
  const Vec br = g.best_response(v({0.0, 0.0}), v({2.0}), 0);
  CHECK(br[0] == doctest::Approx(4.0));

  Rng rng(8);
  CHECK(max_gradient_error(g, rng, 100) < 1e-4);
}

TEST_CASE("sampled cournot instances satisfy first-order conditions") {
  Rng rng(90);
  for (int rep = 0; rep < 30; ++rep) {
    Rng sub = rng.substream(static_cast<std::uint64_t>(rep));
    const GameInstance inst = sample_instance(Family::Cournot, sub);
    CHECK(inst.a >= 10.0);
    CHECK(inst.a <= 100.0);
    CHECK(inst.b <= -0.01);
    CHECK(inst.cost >= 2.0);
    CHECK(inst.cost <= 20.0);
    const double q = inst.eq_strategy[0];
    CHECK(q == doctest::Approx(cournot_nash_quantity(2, inst.cost, inst.a, inst.b)));
    if (q > 0.0) {
      // d/dq_i profit = a + b*Q - c + b*q_i must vanish at the interior NE.
      const double foc = inst.a + inst.b * 2.0 * q - inst.cost + inst.b * q;
      CHECK(std::abs(foc) < 1e-8);
    }
    CHECK(certify_instance(inst) <= 1e-6);
  }
}

TEST_CASE("bertrand demand split and payoffs") {
  // Strictly higher price sells nothing.
  const Vec pay_hi = bertrand_payoffs(v({5.0, 3.0}), 2.0, 10.0, -1.0);
  CHECK(pay_hi[0] == doctest::Approx(0.0));

  // Tie splits D(p) = 10 - p evenly.
  const Vec pay_tie = bertrand_payoffs(v({4.0, 4.0}), 2.0, 10.0, -1.0);
  CHECK(pay_tie[0] == doctest::Approx(6.0));
  CHECK(pay_tie[1] == doctest::Approx(6.0));

  // Pricing at marginal cost earns zero and no grid deviation improves it.
  const ParametricGame g = bertrand_game(2, 10.0, -1.0);
  const Exploitability e = exploitability(g, v({2.0}), v({2.0, 2.0}));
  CHECK(e.method == "grid");
  CHECK(e.value <= 1e-9);

  // Independent oracle: dense scan of unilateral deviations.
  double best_gain = 0.0;
  for (int k = 0; k <= 100000; ++k) {
    const double y = 10.0 * k / 100000.0;
    best_gain = std::max(best_gain, bertrand_payoffs(v({y, 2.0}), 2.0, 10.0, -1.0)[0]);
  }
  CHECK(best_gain <= 1e-12);
}

TEST_CASE("sampled bertrand instances are certified") {
  Rng rng(91);
  for (int rep = 0; rep < 30; ++rep) {
    Rng sub = rng.substream(static_cast<std::uint64_t>(rep));
    const GameInstance inst = sample_instance(Family::Bertrand, sub);
    CHECK(certify_instance(inst) <= 1e-6);
  }
}
