#pragma once

#include <functional>
#include <string>
#include <vector>

#include "igt/rng.hpp"
#include "igt/spaces.hpp"
#include "igt/types.hpp"

namespace igt {

/// One strategy per player, stored concatenated with player offsets.
struct StrategyProfile {
  Vec flat;
  std::vector<Index> offsets;  // size n_players + 1

  Index players() const { return static_cast<Index>(offsets.size()) - 1; }
  Index block_dim(Index i) const { return offsets[i + 1] - offsets[i]; }
  Eigen::VectorBlock<Vec> block(Index i) { return flat.segment(offsets[i], block_dim(i)); }
  Eigen::VectorBlock<const Vec> block(Index i) const {
    return flat.segment(offsets[i], block_dim(i));
  }
};

/// How exploitability's per-player inner max is solved for a game family.
enum class BestResponseMethod { ClosedForm, Grid, GradientAscent };

inline const char* to_string(BestResponseMethod m) {
  switch (m) {
    case BestResponseMethod::ClosedForm: return "closed_form";
    case BestResponseMethod::Grid: return "grid";
    case BestResponseMethod::GradientAscent: return "pga";
  }
  return "?";
}

/// A concave-game form with parametric payoffs u(x; theta) and analytic
/// gradients. Payoff callbacks take the flat strategy profile; gradient
/// callbacks return the deviating player's own block (grad_payoff_x) or the
/// full parameter gradient of that player's payoff (grad_payoff_theta).
struct ParametricGame {
  Index n_players = 0;
  std::vector<Space> strategy_spaces;  // one per player
  Space param_space = Space::box(Vec::Zero(1), Vec::Zero(1));

  std::function<Vec(const Vec& x, const Vec& theta)> payoff;
  std::function<Vec(const Vec& x, const Vec& theta, Index i)> grad_payoff_x;
  std::function<Vec(const Vec& x, const Vec& theta, Index i)> grad_payoff_theta;

  /// Optional closed-form argmax_{y_i} u_i(y_i, x_{-i}; theta); required when
  /// br_method == ClosedForm.
  std::function<Vec(const Vec& x, const Vec& theta, Index i)> best_response;
  BestResponseMethod br_method = BestResponseMethod::GradientAscent;

  /// Payoffs differentiable in own strategy. Solvers may backtrack ascent
  /// steps only when true; subgradient payoffs (Leontief min) take raw steps.
  bool smooth_payoffs = true;

  /// Upper end of the grid used by Grid best responses; the strategy box
  /// bound applies when smaller (deviations beyond it are never profitable).
  double grid_hi = std::numeric_limits<double>::infinity();

  std::vector<Index> offsets;  // strategy block offsets, size n_players + 1
  Index strategy_dim() const { return offsets.back(); }
  Index block_dim(Index i) const { return offsets[i + 1] - offsets[i]; }

  Space joint_strategy_space() const { return Space::product(strategy_spaces); }
  StrategyProfile wrap(Vec flat) const { return StrategyProfile{std::move(flat), offsets}; }

  /// Profile equal to x except player i's block is y_i.
  Vec with_block(const Vec& x, Index i, const Vec& y_i) const {
    Vec out = x;
    out.segment(offsets[i], block_dim(i)) = y_i;
    return out;
  }
};

/// Fills offsets from strategy_spaces; call after populating the spaces.
void finalize_offsets(ParametricGame& game);

/// A game form with unknown parameters plus the observed equilibrium profile.
struct InverseGame {
  ParametricGame form;
  StrategyProfile observed;
};

/// Max relative error between analytic gradients and central finite
/// differences of `payoff` at `n_points` interior points (h = 1e-5).
/// Checks both grad_payoff_x and grad_payoff_theta.
double max_gradient_error(const ParametricGame& game, Rng& rng, int n_points = 100,
                          double h = 1e-5);

/// n-player test game u_i(x; theta) = -(x_i - theta)^2 with x_i in [-2,2] and
/// scalar theta in [-1,1]; the unique NE is x_i = theta for every theta.
ParametricGame quadratic_toy(Index n_players);

/// Two-player zero-sum matrix game on k-simplices, u_1 = x1' A x2 with
/// A = mat(theta). `nash_anchor` builds A so a given interior profile is an NE.
ParametricGame random_matrix_game(Index k, const Space& entry_box);
Mat matrix_with_interior_nash(const Vec& x1, const Vec& x2, double value, Rng& rng);

}  // namespace igt
