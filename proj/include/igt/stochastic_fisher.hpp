#pragma once

#include "igt/markov.hpp"

namespace igt {

/// The per-step objective of the stochastic Fisher market:
///   p . (q - sum_i X_i) + sum_i (b_i + s_i) log(u_i(X_i; theta_i) / (b_i + s_i))
/// with linear buyer utilities and the usual log floor. The seller minimizes
/// it, buyers maximize their own terms.
double sfm_objective(const Vec& supplies, const Vec& budgets, const Vec& prices,
                     const Mat& alloc, const Vec& savings, const Mat& types);

/// Two-sided Markov game: state = [supplies; budgets]; player 0 sets prices,
/// buyer i chooses (allocation row, savings). Budgets evolve as savings plus
/// an exogenous income draw; supplies are constant. Parameters are the
/// flattened linear types. rng draws the per-buyer income ranges.
MarkovGame stochastic_fisher_game(Index n_buyers, Index n_goods, const Vec& supplies,
                                  double discount, Rng& rng);

/// The linear policy profile used by the demos: prices and allocations are
/// affine in the budget part of the state, clamped into the action boxes.
PolicyClass sfm_affine_policy_class(const MarkovGame& game, Index n_buyers, Index n_goods);

}  // namespace igt
