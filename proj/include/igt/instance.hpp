#pragma once

#include <string>

#include "igt/fisher.hpp"
#include "igt/games.hpp"
#include "igt/inverse_planner.hpp"
#include "igt/oligopoly.hpp"

namespace igt {

enum class Family {
  FisherLinear,
  FisherCobbDouglas,
  FisherLeontief,
  Cournot,
  Bertrand,
  QuadraticToy,
  RandomMatrix,
};

const char* to_string(Family f);
Family family_from_string(const std::string& name);

/// Which block of a game's parameters is treated as unknown.
enum class ParamMode { BudgetsOnly, TypesAndBudgets, MarginalCost, Direct };

const char* to_string(ParamMode m);
ParamMode param_mode_from_string(const std::string& name);

/// A sampled game with known true parameters and a certified ground-truth
/// equilibrium (exploitability at theta_star is at most 1e-6).
struct GameInstance {
  Family family = Family::QuadraticToy;
  std::uint64_t seed = 0;
  int resamples = 0;  // certification failures before this draw

  // Fisher families.
  FisherMarket market;
  FisherEquilibrium equilibrium;

  // Oligopoly families: constants and true marginal cost.
  double a = 0.0, b = 0.0;    // Cournot inverse demand
  double cd = 0.0, d = 0.0;   // Bertrand demand
  double cost = 0.0;
  Vec eq_strategy;            // quantities / prices

  // Synthetic families.
  Index n_players_toy = 2;
  Index matrix_k = 0;
  Vec theta_direct;  // toy theta / flattened matrix entries
  Vec x_direct;

  /// The parametric game for a given mode (validates the combination).
  ParametricGame make_game(ParamMode mode) const;
  /// True parameter vector in that game's packing.
  Vec true_params(ParamMode mode) const;
  /// Observed equilibrium profile.
  StrategyProfile observed() const;
  /// Modes this family supports; the first is the family default.
  std::vector<ParamMode> supported_modes() const;

  std::string to_json() const;
  static GameInstance from_json(const std::string& text);
};

/// Draws family parameters per the experiment distributions (U[0,10] draws
/// floored at 0.1 for budgets/types; Cournot a~U[10,100], b~U[-10,-0.01],
/// c~U[2,20]; Bertrand cd~U[10,100], d~U[-10,-0.01], c~U[2,20]), computes the
/// ground-truth equilibrium, and resamples until the certificate passes.
GameInstance sample_instance(Family family, Rng& rng);

/// Exploitability of the stored equilibrium at the true parameters.
double certify_instance(const GameInstance& inst);

}  // namespace igt
