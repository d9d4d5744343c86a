#include <doctest.h>

#include "igt/spaces.hpp"

using namespace igt;

namespace {

Vec v(std::initializer_list<double> vals) {
  Vec out(static_cast<Index>(vals.size()));
  Index i = 0;
  for (double x : vals) out[i++] = x;
  return out;
}

// Brute-force quadratic-program oracle: nearest simplex point on a fine grid.
Vec simplex_projection_oracle(const Vec& z, double step) {
  Vec best = Vec::Zero(3);
  double best_d = std::numeric_limits<double>::infinity();
  for (double z1 = 0.0; z1 <= 1.0 + 1e-12; z1 += step) {
    for (double z2 = 0.0; z2 + z1 <= 1.0 + 1e-12; z2 += step) {
      Vec cand = v({z1, z2, 1.0 - z1 - z2});
      const double dist = (cand - z).squaredNorm();
      if (dist < best_d) {
        best_d = dist;
        best = cand;
      }
    }
  }
  return best;
}

}  // namespace

TEST_CASE("simplex projection matches the stated points") {
  const Space s2 = Space::simplex(2, 1.0);
  CHECK((project(s2, v({0.5, 0.5})) - v({0.5, 0.5})).norm() == doctest::Approx(0.0));
  CHECK((project(s2, v({2.0, 0.0})) - v({1.0, 0.0})).norm() == doctest::Approx(0.0));

  const Space s3 = Space::simplex(3, 1.0);
  const Vec got = project(s3, v({0.4, 0.2, 0.1}));
  CHECK((got - v({0.5, 0.3, 0.2})).norm() < 1e-12);
  const Vec oracle = simplex_projection_oracle(v({0.4, 0.2, 0.1}), 1e-3);
  CHECK((got - oracle).norm() < 2e-3);
}

TEST_CASE("box and orthant projections clamp") {
  const Space box = Space::box(v({0.0, -1.0}), v({1.0, 1.0}));
  CHECK((project(box, v({2.0, -3.0})) - v({1.0, -1.0})).norm() == doctest::Approx(0.0));
  const Space orth = Space::nonnegative_orthant(2);
  CHECK((project(orth, v({-1.0, 2.0})) - v({0.0, 2.0})).norm() == doctest::Approx(0.0));
}

TEST_CASE("projection errors on dimension mismatch") {
  CHECK_THROWS_AS(project(Space::simplex(3), v({1.0, 2.0})), std::invalid_argument);
}

TEST_CASE("product projection is factorwise") {
  const Space prod = Space::product({Space::simplex(2), Space::box(1, 0.0, 1.0)});
  const Vec got = project(prod, v({2.0, 0.0, 5.0}));
  CHECK((got - v({1.0, 0.0, 1.0})).norm() == doctest::Approx(0.0));
  CHECK(prod.dim() == 3);
  CHECK(prod.factor_offset(1) == 2);
}

TEST_CASE("projection properties on random spaces") {
  Rng rng(42);
  const std::vector<Space> spaces = {
      Space::box(v({-1.0, 0.0, 2.0}), v({1.0, 0.5, 3.0})),
      Space::simplex(4, 2.5),
      Space::nonnegative_orthant(3),
      Space::product({Space::simplex(3), Space::box(2, -1.0, 1.0)}),
  };
  for (const Space& s : spaces) {
    for (int rep = 0; rep < 200; ++rep) {
      Vec a(s.dim()), b(s.dim());
      for (Index i = 0; i < s.dim(); ++i) {
        a[i] = rng.uniform(-4.0, 4.0);
        b[i] = rng.uniform(-4.0, 4.0);
      }
      const Vec pa = project(s, a), pb = project(s, b);
      CHECK(s.contains(pa, 1e-10));
      CHECK((project(s, pa) - pa).norm() <= 1e-12);
      CHECK((pa - pb).norm() <= (a - b).norm() + 1e-12);
    }
  }
}

TEST_CASE("uniform sampling stays feasible and reproduces under a fixed seed") {
  const Space degenerate = Space::box(v({0.0}), v({0.0}));
  Rng rng(7);
  CHECK(sample_uniform(degenerate, rng)[0] == 0.0);

  const Space s3 = Space::simplex(3, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    const Vec z = sample_uniform(s3, rng);
    CHECK(std::abs(z.sum() - 1.0) <= 1e-12);
    CHECK(z.minCoeff() >= 0.0);
  }

  const Space box = Space::box(2, 0.0, 10.0);
  Rng r1(123), r2(123);
  const Vec a = sample_uniform(box, r1);
  const Vec b = sample_uniform(box, r2);
  CHECK(a == b);

  CHECK_THROWS_AS(sample_uniform(Space::nonnegative_orthant(2), rng), std::invalid_argument);
}

TEST_CASE("substreams are independent of draw order") {
  Rng root(99);
  Rng s1 = root.substream(3);
  root.next_u64();
  root.next_u64();
  Rng s2 = Rng(99).substream(3);
  CHECK(s1.next_u64() == s2.next_u64());
}
