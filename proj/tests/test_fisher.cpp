#include <doctest.h>

#include <cmath>

#include "igt/fisher.hpp"
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

Mat row(const Vec& r) {
  Mat m(1, r.size());
  m.row(0) = r.transpose();
  return m;
}

}  // namespace

TEST_CASE("eg_objective evaluates the saddle formula") {
  // 1 buyer, 1 good, linear u = theta*x.
  const Mat types = row(v({1.0}));
  CHECK(eg_objective(UtilityClass::Linear, v({1.0}), row(v({1.0})), types, v({1.0})) ==
        doctest::Approx(0.0));
  CHECK(eg_objective(UtilityClass::Linear, v({2.0}), row(v({0.5})), types, v({1.0})) ==
        doctest::Approx(std::log(0.5) + 1.0));
  CHECK(eg_objective(UtilityClass::Linear, v({1.0}), row(v({1.0})), row(v({3.0})), v({2.0})) ==
        doctest::Approx(2.0 * std::log(3.0)));
}

TEST_CASE("buyer_best_response per utility class") {
  CHECK((buyer_best_response(UtilityClass::Linear, v({2.0, 1.0}), 1.0, v({1.0, 1.0})) -
         v({1.0, 0.0}))
            .norm() == doctest::Approx(0.0));
  CHECK((buyer_best_response(UtilityClass::CobbDouglas, v({0.5, 0.5}), 4.0, v({1.0, 2.0})) -
         v({2.0, 1.0}))
            .norm() == doctest::Approx(0.0));
  CHECK((buyer_best_response(UtilityClass::Leontief, v({1.0, 1.0}), 8.0, v({1.0, 3.0})) -
         v({2.0, 2.0}))
            .norm() == doctest::Approx(0.0));
  CHECK_THROWS(buyer_best_response(UtilityClass::Linear, v({1.0, 1.0}), 1.0, v({0.0, 1.0})));
}

TEST_CASE("best responses spend the budget and beat random feasible bundles") {
  Rng rng(31);
  for (UtilityClass cls :
       {UtilityClass::Linear, UtilityClass::CobbDouglas, UtilityClass::Leontief}) {
    for (int rep = 0; rep < 20; ++rep) {
      Rng sub = rng.substream(100 * static_cast<int>(cls) + rep);
      const Index m = 3;
      Vec theta(m), p(m);
      for (Index j = 0; j < m; ++j) {
        theta[j] = sub.uniform(0.1, 10.0);
        p[j] = sub.uniform(0.2, 5.0);
      }
      if (cls == UtilityClass::CobbDouglas) theta /= theta.sum();
      const double b = sub.uniform(0.5, 10.0);
      const Vec x = buyer_best_response(cls, theta, b, p);
      CHECK(p.dot(x) == doctest::Approx(b).epsilon(1e-10));
      const double u_star = buyer_utility(cls, x, theta);
      for (int k = 0; k < 50; ++k) {
        Vec raw(m);
        for (Index j = 0; j < m; ++j) raw[j] = sub.uniform(0.0, 1.0);
        const Vec feasible = raw * (b / p.dot(raw));
        CHECK(buyer_utility(cls, feasible, theta) <= u_star + 1e-9);
      }
    }
  }
}

TEST_CASE("linear best-response argmax set is scale invariant in theta") {
  Rng rng(77);
  for (int rep = 0; rep < 50; ++rep) {
    Rng sub = rng.substream(rep);
    Vec theta(3), p(3);
    for (Index j = 0; j < 3; ++j) {
      theta[j] = sub.uniform(0.1, 10.0);
      p[j] = sub.uniform(0.2, 5.0);
    }
    const double c = sub.uniform(0.1, 7.0);
    const Vec x1 = buyer_best_response(UtilityClass::Linear, theta, 2.0, p);
    const Vec x2 = buyer_best_response(UtilityClass::Linear, Vec(c * theta), 2.0, p);
    for (Index j = 0; j < 3; ++j) CHECK((x1[j] > 0.0) == (x2[j] > 0.0));
  }
}

TEST_CASE("sampled Fisher instances are certified and within the floored ranges") {
  Rng rng(500);
  for (Family f :
       {Family::FisherLinear, Family::FisherCobbDouglas, Family::FisherLeontief}) {
    for (int rep = 0; rep < 25; ++rep) {
      Rng sub = rng.substream(static_cast<std::uint64_t>(1000 + rep));
      const GameInstance inst = sample_instance(f, sub);
      CHECK(inst.market.budgets.minCoeff() >= 0.1);
      CHECK(inst.market.budgets.maxCoeff() <= 10.0);
      if (f != Family::FisherCobbDouglas) {
        CHECK(inst.market.types.minCoeff() >= 0.1);
        CHECK(inst.market.types.maxCoeff() <= 10.0);
      } else {
        for (Index i = 0; i < inst.market.n_buyers(); ++i)
          CHECK(inst.market.types.row(i).sum() == doctest::Approx(1.0));
      }
      CHECK(certify_instance(inst) <= 1e-6);
    }
  }
}

TEST_CASE("symmetric linear market has a symmetric equilibrium") {
  FisherMarket mkt;
  mkt.cls = UtilityClass::Linear;
  mkt.types = Mat::Constant(3, 2, 1.0);
  mkt.budgets = Vec::Constant(3, 6.0);
  const FisherEquilibrium eq = solve_fisher_equilibrium(mkt);
  CHECK(eq.prices[0] == doctest::Approx(eq.prices[1]).epsilon(1e-8));
  for (Index i = 0; i < 3; ++i)
    CHECK(eq.alloc.row(i).sum() == doctest::Approx(eq.alloc.row(0).sum()).epsilon(1e-7));
}

TEST_CASE("EG game gradients match finite differences for every class") {
  Rng rng(642);
  for (UtilityClass cls :
       {UtilityClass::Linear, UtilityClass::CobbDouglas, UtilityClass::Leontief}) {
    for (FisherParamMode mode :
         {FisherParamMode::BudgetsOnly, FisherParamMode::TypesAndBudgets}) {
      Rng sub = rng.substream(10 * static_cast<int>(cls) + static_cast<int>(mode));
      const FisherMarket mkt = sample_fisher(cls, 3, 2, sub);
      const ParametricGame g = eg_game(cls, 3, 2, mode, mkt.types);
      CHECK(max_gradient_error(g, sub, 100) < 1e-4);
    }
  }
}
