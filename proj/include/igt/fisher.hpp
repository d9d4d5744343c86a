#pragma once

#include <cmath>

#include "igt/games.hpp"
#include "igt/types.hpp"

namespace igt {

enum class UtilityClass { Linear, CobbDouglas, Leontief };

const char* to_string(UtilityClass c);

/// Floor applied inside log() so the Eisenberg-Gale objective stays total.
inline constexpr double kUtilityFloor = 1e-9;

/// log with a linear continuation below the floor: equals log(max(u, floor))
/// above it but keeps a restoring slope at zero utility.
inline double floored_log(double u) {
  if (u >= kUtilityFloor) return std::log(u);
  return std::log(kUtilityFloor) + (u - kUtilityFloor) / kUtilityFloor;
}

/// Derivative of floored_log.
inline double floored_log_d(double u) { return 1.0 / std::max(u, kUtilityFloor); }

/// Buyer utility u(x; theta). Cobb-Douglas types are exponents (kept on the
/// unit simplex by construction), Leontief uses min_j x_j / theta_j with ties
/// resolved at the lexicographically first coordinate.
double buyer_utility(UtilityClass cls, const Vec& x, const Vec& theta);

/// log(max(u, 1e-9)) and its subgradients.
double log_utility(UtilityClass cls, const Vec& x, const Vec& theta);
Vec grad_log_utility_x(UtilityClass cls, const Vec& x, const Vec& theta);
Vec grad_log_utility_theta(UtilityClass cls, const Vec& x, const Vec& theta);

/// Eisenberg-Gale saddle objective with unit supplies: the buyers' budget-
/// weighted log utilities plus the profit of a fictional auctioneer. The
/// seller minimizes in p, buyers maximize in X (rows of X per buyer).
double eg_objective(UtilityClass cls, const Vec& p, const Mat& X, const Mat& types,
                    const Vec& budgets);

/// Budget-constrained demand: spends exactly b_i. Linear splits ties
/// uniformly across max bang-per-buck goods and throws when a free good has
/// positive value (unbounded demand).
Vec buyer_best_response(UtilityClass cls, const Vec& theta_i, double b_i, const Vec& p);

struct FisherMarket {
  UtilityClass cls = UtilityClass::Linear;
  Mat types;    // n_buyers x n_goods
  Vec budgets;  // n_buyers
  Index n_buyers() const { return types.rows(); }
  Index n_goods() const { return types.cols(); }
};

struct FisherEquilibrium {
  Vec prices;
  Mat alloc;  // n_buyers x n_goods
};

/// Competitive equilibrium with unit supplies. Cobb-Douglas is closed form;
/// linear runs proportional-response fixed-point iteration; Leontief runs
/// damped tatonnement (gradient descent on the EG dual). tol bounds the
/// market-clearing residual.
FisherEquilibrium solve_fisher_equilibrium(const FisherMarket& market, double tol = 1e-10,
                                           int max_iters = 100000);

enum class FisherParamMode { BudgetsOnly, TypesAndBudgets };

/// Parameter vector layout for the EG game: BudgetsOnly packs budgets;
/// TypesAndBudgets packs [types (buyer-major); budgets].
Vec pack_fisher_params(const FisherMarket& market, FisherParamMode mode);
void unpack_fisher_params(const Vec& theta, FisherParamMode mode, UtilityClass cls,
                          Index n_buyers, Index n_goods, Mat& types_out, Vec& budgets_out,
                          const Mat& fixed_types);

/// The EG min-max market as an (1 + n_buyers)-player concave game. Player 0
/// is the seller (payoff -f), players 1..n are buyers with their own EG
/// terms. fixed_types is used in BudgetsOnly mode and may be empty otherwise.
ParametricGame eg_game(UtilityClass cls, Index n_buyers, Index n_goods, FisherParamMode mode,
                       const Mat& fixed_types);

/// Cobb-Douglas TypesAndBudgets in budget-scaled type coordinates
/// kappa_ij = b_i * theta_ij (buyer-major, box [0, 10]^{n*m}). The EG payoffs
/// are affine in kappa, so the inverse problem is convex-concave; use
/// scaled_types_to_packed to map a solution back to [types; budgets].
ParametricGame eg_game_cd_scaled(Index n_buyers, Index n_goods);
Vec pack_cd_scaled(const FisherMarket& market);
Vec scaled_types_to_packed(const Vec& kappa, Index n_buyers, Index n_goods);

/// Strategy profile [p; X_1; ...; X_n] for the EG game.
Vec pack_eg_profile(const Vec& prices, const Mat& alloc);

/// Appendix sampling: budgets and types from U[0,10] floored at 0.1;
/// Cobb-Douglas types normalized to the per-buyer simplex.
FisherMarket sample_fisher(UtilityClass cls, Index n_buyers, Index n_goods, Rng& rng);

/// Price/allocation caps defining the EG strategy boxes.
double eg_price_cap(Index n_buyers);
double eg_alloc_cap();

}  // namespace igt
