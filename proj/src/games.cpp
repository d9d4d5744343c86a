#include "igt/games.hpp"

#include <cmath>
#include <stdexcept>

namespace igt {

void finalize_offsets(ParametricGame& game) {
  game.n_players = static_cast<Index>(game.strategy_spaces.size());
  game.offsets.assign(static_cast<std::size_t>(game.n_players) + 1, 0);
  for (Index i = 0; i < game.n_players; ++i)
    game.offsets[i + 1] = game.offsets[i] + game.strategy_spaces[i].dim();
}

namespace {

// Interior point: uniform sample pulled 10% toward the centroid so finite
// differences never step outside the domain.
Vec interior_point(const Space& space, Rng& rng) {
  Vec z = sample_uniform(space, rng);
  Vec c = project(space, Vec::Zero(space.dim()));
  return 0.9 * z + 0.1 * c;
}

}  // namespace

double max_gradient_error(const ParametricGame& game, Rng& rng, int n_points, double h) {
  const Space joint = game.joint_strategy_space();
  double worst = 0.0;
  for (int p = 0; p < n_points; ++p) {
    const Vec x = interior_point(joint, rng);
    const Vec theta = interior_point(game.param_space, rng);
    const Vec base = game.payoff(x, theta);
    for (Index i = 0; i < game.n_players; ++i) {
      const Vec gx = game.grad_payoff_x(x, theta, i);
      for (Index j = 0; j < game.block_dim(i); ++j) {
        Vec xp = x, xm = x;
        xp[game.offsets[i] + j] += h;
        xm[game.offsets[i] + j] -= h;
        const double fd = (game.payoff(xp, theta)[i] - game.payoff(xm, theta)[i]) / (2 * h);
        const double denom = std::max({std::abs(fd), std::abs(gx[j]), 1.0});
        worst = std::max(worst, std::abs(gx[j] - fd) / denom);
      }
      const Vec gt = game.grad_payoff_theta(x, theta, i);
      for (Index j = 0; j < theta.size(); ++j) {
        Vec tp = theta, tm = theta;
        tp[j] += h;
        tm[j] -= h;
        const double fd = (game.payoff(x, tp)[i] - game.payoff(x, tm)[i]) / (2 * h);
        const double denom = std::max({std::abs(fd), std::abs(gt[j]), 1.0});
        worst = std::max(worst, std::abs(gt[j] - fd) / denom);
      }
    }
    (void)base;
  }
  return worst;
}

ParametricGame quadratic_toy(Index n_players) {
  if (n_players < 1) throw std::invalid_argument("quadratic_toy: need n >= 1 players");
  ParametricGame g;
  for (Index i = 0; i < n_players; ++i) g.strategy_spaces.push_back(Space::box(1, -2.0, 2.0));
  g.param_space = Space::box(1, -1.0, 1.0);
  finalize_offsets(g);
  g.payoff = [n_players](const Vec& x, const Vec& theta) {
    Vec u(n_players);
    for (Index i = 0; i < n_players; ++i) u[i] = -(x[i] - theta[0]) * (x[i] - theta[0]);
    return u;
  };
  g.grad_payoff_x = [](const Vec& x, const Vec& theta, Index i) {
    return Vec::Constant(1, -2.0 * (x[i] - theta[0]));
  };
  g.grad_payoff_theta = [](const Vec& x, const Vec& theta, Index i) {
    return Vec::Constant(1, 2.0 * (x[i] - theta[0]));
  };
  g.best_response = [](const Vec&, const Vec& theta, Index) {
    return Vec::Constant(1, std::clamp(theta[0], -2.0, 2.0));
  };
  g.br_method = BestResponseMethod::ClosedForm;
  return g;
}

Mat matrix_with_interior_nash(const Vec& x1, const Vec& x2, double value, Rng& rng) {
  const Index k = x1.size();
  Mat c(k, k);
  for (Index r = 0; r < k; ++r)
    for (Index s = 0; s < k; ++s) c(r, s) = rng.uniform(-1.0, 1.0);
  // Remove the components seen by unilateral deviations so both row and
  // column payoffs are flat at (x1, x2).
  c -= (x1 * (x1.transpose() * c)) / x1.squaredNorm();
  c -= ((c * x2) * x2.transpose()) / x2.squaredNorm();
  return Mat::Constant(k, k, value) + c;
}

ParametricGame random_matrix_game(Index k, const Space& entry_box) {
  if (entry_box.dim() != k * k)
    throw std::invalid_argument("random_matrix_game: entry box must have dim k*k");
  ParametricGame g;
  g.strategy_spaces = {Space::simplex(k), Space::simplex(k)};
  g.param_space = entry_box;
  finalize_offsets(g);
  auto mat_of = [k](const Vec& theta) {
    return Eigen::Map<const Mat>(theta.data(), k, k);
  };
  g.payoff = [k, mat_of](const Vec& x, const Vec& theta) {
    const auto a = mat_of(theta);
    const double v = x.head(k).transpose() * a * x.tail(k);
    Vec u(2);
    u << v, -v;
    return u;
  };
  g.grad_payoff_x = [k, mat_of](const Vec& x, const Vec& theta, Index i) -> Vec {
    const auto a = mat_of(theta);
    if (i == 0) return a * x.tail(k);
    return -(a.transpose() * x.head(k));
  };
  g.grad_payoff_theta = [k](const Vec& x, const Vec&, Index i) -> Vec {
    Mat outer = x.head(k) * x.tail(k).transpose();
    Vec flat = Eigen::Map<Vec>(outer.data(), k * k);
    return i == 0 ? flat : Vec(-flat);
  };
  // Multilinear payoffs: the inner max over a simplex is attained at a vertex.
  g.best_response = [k, mat_of](const Vec& x, const Vec& theta, Index i) {
    const auto a = mat_of(theta);
    Vec scores = (i == 0) ? Vec(a * x.tail(k)) : Vec(-(a.transpose() * x.head(k)));
    Index best = 0;
    scores.maxCoeff(&best);
    Vec y = Vec::Zero(k);
    y[best] = 1.0;
    return y;
  };
  g.br_method = BestResponseMethod::ClosedForm;
  return g;
}

}  // namespace igt
