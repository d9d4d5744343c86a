#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "igt/games.hpp"
#include "igt/rng.hpp"
#include "igt/spaces.hpp"
#include "igt/types.hpp"

namespace igt {

/// Markov game state: finite games use idx, continuous games use vec.
struct State {
  int idx = -1;
  Vec vec;
  static State finite(int i) { return State{i, Vec()}; }
  static State continuous(Vec v) { return State{-1, std::move(v)}; }
};

/// Infinite-horizon discounted parametric Markov game with a differentiable
/// simulator interface. Finite-state games supply transition_probs and its
/// action gradient (finite actions enter via the simplex embedding: actions
/// are mixed-strategy vectors, rewards multilinear, transitions affine per
/// player). Continuous-state games supply a reparameterized step function
/// with state/action Jacobians.
struct MarkovGame {
  Index n_players = 0;
  int n_states = 0;  // 0 => continuous state
  Space state_space = Space::box(Vec::Zero(1), Vec::Zero(1));
  std::vector<Space> action_spaces;
  Space param_space = Space::box(Vec::Zero(1), Vec::Zero(1));
  double discount = 0.9;

  std::function<Vec(const State&, const Vec& a, const Vec& theta)> reward;
  std::function<Vec(const State&, const Vec& a, const Vec& theta, Index i)> grad_reward_a;
  std::function<Vec(const State&, const Vec& a, const Vec& theta, Index i)> grad_reward_theta;
  /// Continuous-state games only (may be empty otherwise).
  std::function<Vec(const State&, const Vec& a, const Vec& theta, Index i)> grad_reward_state;

  // Finite-state transitions.
  std::function<Vec(const State&, const Vec& a)> transition_probs;            // n_states
  std::function<Mat(const State&, const Vec& a)> grad_transition_probs;       // n_states x a_dim
  Vec init_probs;

  // Continuous-state transitions, s' = step(s, a, noise).
  int noise_dim = 0;
  std::function<Vec(Rng&)> sample_noise;
  std::function<Vec(const State&, const Vec& a, const Vec& noise)> step;
  std::function<Mat(const State&, const Vec& a, const Vec& noise)> jac_step_state;
  std::function<Mat(const State&, const Vec& a, const Vec& noise)> jac_step_action;
  std::function<Vec(Rng&)> sample_init;

  std::vector<Index> action_offsets;
  Index action_dim() const { return action_offsets.back(); }
  Index action_block_dim(Index i) const { return action_offsets[i + 1] - action_offsets[i]; }
  bool finite() const { return n_states > 0; }
};

/// Fills action_offsets from action_spaces.
void finalize_action_offsets(MarkovGame& game);

/// Checks finite-game transition rows sum to one (at pure action profiles;
/// affine transitions then sum to one everywhere). Throws on violation.
void validate_markov_game(const MarkovGame& game, double tol = 1e-12);

/// Stationary parametric policy profile: per-player parameter blocks inside
/// one vector, per-player action maps differentiable in the parameters.
struct PolicyClass {
  Space param_space = Space::box(Vec::Zero(1), Vec::Zero(1));
  std::vector<Index> param_offsets;  // n_players + 1
  /// Action of player i given its own parameter block.
  std::function<Vec(const Vec& x_i, const State& s, Index i)> act;
  /// d action_i / d x_i.
  std::function<Mat(const Vec& x_i, const State& s, Index i)> jac_params;
  /// d action_i / d state (continuous-state games; empty means zero).
  std::function<Mat(const Vec& x_i, const State& s, Index i)> jac_state;

  Index param_dim() const { return param_offsets.back(); }
  Index block_dim(Index i) const { return param_offsets[i + 1] - param_offsets[i]; }
  Eigen::VectorBlock<const Vec> block(const Vec& x, Index i) const {
    return x.segment(param_offsets[i], block_dim(i));
  }
};

/// Tabular policy for finite games: the parameter block of player i is the
/// concatenation over states of a point in its action space.
PolicyClass tabular_policy_class(const MarkovGame& game);
/// State-independent action, a_i = x_i.
PolicyClass constant_policy_class(const MarkovGame& game);

using FixedPolicy = std::function<Vec(const State&)>;

/// Freeze a parametric profile into per-player fixed policies.
std::vector<FixedPolicy> freeze_policies(const PolicyClass& pc, const Vec& x);

struct History {
  std::vector<State> states;
  Mat actions;  // horizon x action_dim
  Mat noises;   // horizon x noise_dim (continuous games)
  int horizon() const { return static_cast<int>(states.size()); }
};

/// Markov game form with unknown parameters plus the observed equilibrium
/// policy profile.
struct InverseMarkovGame {
  MarkovGame form;
  std::vector<FixedPolicy> observed;
};

/// Truncation horizon with tail bound r_max * gamma^H / (1 - gamma) <= eps.
int horizon_for_tail(double discount, double r_max, double eps_tail = 1e-6);

/// Rolls the policy profile forward `horizon` steps with exact transition
/// sampling; discounting is applied in return computations, not here.
History simulate(const MarkovGame& game, const std::vector<FixedPolicy>& policies, int horizon,
                 Rng& rng);

/// Per-player truncated discounted reward sums along a history.
Vec discounted_return(const MarkovGame& game, const History& h, const Vec& theta);

/// Parameter-gradient estimator: sum_i [sum_t gamma^t grad_theta r_i along
/// player i's deviation history minus the same along the equilibrium
/// history].
Vec grad_estimator_theta(const MarkovGame& game, const std::vector<History>& deviations,
                         const History& equilibrium, const Vec& theta);

/// One player's action source inside a differentiable rollout: a frozen
/// policy, or pc player `pc_player` reading its block at xi_offset.
struct ActionSource {
  FixedPolicy fixed;
  Index pc_player = -1;
  Index xi_offset = 0;
};

/// A rollout carrying everything needed for pathwise gradients: per-step
/// action Jacobians w.r.t. the parameter vector xi, state Jacobians
/// (continuous games), and per-transition likelihood-ratio scores
/// d log P(s_{t+1} | s_t, a_t) / d xi (finite games).
struct DiffRollout {
  History h;
  std::vector<Mat> da_dxi;
  std::vector<Mat> ds_dxi;
  std::vector<Vec> scores;
};

DiffRollout rollout_with_grads(const MarkovGame& game, const PolicyClass& pc,
                               const std::vector<ActionSource>& sources, const Vec& xi,
                               int horizon, Rng& rng);

/// d/dxi of the truncated discounted return of `player` along the rollout:
/// the pathwise chain-rule part plus score terms on downstream rewards.
Vec return_grad_xi(const MarkovGame& game, const DiffRollout& roll, const Vec& theta,
                   Index player);

/// Pathwise policy-gradient estimate of d/dx sum_i u_i(pi_i^x, others fixed)
/// along per-player deviation rollouts of length `horizon`. Finite-state
/// transitions contribute likelihood-ratio terms on downstream returns so the
/// estimator stays unbiased for the truncated objective.
Vec grad_estimator_x(const MarkovGame& game, const PolicyClass& pc, const Vec& x,
                     const std::vector<FixedPolicy>& others, const Vec& theta, int horizon,
                     Rng& rng);

/// Stochastic GDA (per-iteration deviation and equilibrium rollouts; theta
/// descends, x ascends, both projected).
struct SgdaConfig {
  double eta_theta = 1e-3;
  double eta_x = 1e-2;
  int iters = 2000;
  int batch = 4;
  int horizon = 0;  // 0: derived from eps_tail and r_max
  double eps_tail = 1e-6;
  double r_max = 1.0;
  Vec theta0;
  Vec x0;
  std::uint64_t seed = 1;
  int cert_samples = 128;
  /// Theorem-style rate preset: eta_x = epsilon^4, eta_theta = epsilon^8
  /// (constants unknown, taken as one); default uses the constant rates.
  bool theory_rates = false;
  double epsilon = 0.1;
  int trace_stride = 0;
};

struct SgdaTrace {
  std::vector<double> f_values;  // batch-mean deviation-minus-equilibrium value
  std::vector<int> trace_iters;
  Mat thetas;
  Vec theta_bar;
  Vec theta_last;
  Vec x_last;
  double certificate = 0.0;  // Monte-Carlo deviation-gain estimate at x_last
  int iters_used = 0;
  int horizon = 0;
  double wall_ms = 0.0;
};

SgdaTrace sgda_solve(const InverseMarkovGame& inv, const PolicyClass& pc,
                     const SgdaConfig& cfg);

/// CSV rows (t, s..., a..., r...) for a history at fixed theta.
void write_history_csv(const MarkovGame& game, const History& h, const Vec& theta,
                       const std::string& path);

/// Serializable two-player finite Markov game with rewards linear in theta:
/// r_i(s, p1, p2; theta) = dot(theta, phi[i][s][p1][p2]).
struct FiniteMarkovGame {
  int n_states = 0;
  int n_actions1 = 0, n_actions2 = 0;
  double discount = 0.9;
  Vec init_probs;
  Index param_dim = 0;
  Vec param_lo, param_hi;
  /// phi[player][s][p1][p2] -> param_dim vector.
  std::vector<std::vector<std::vector<std::vector<Vec>>>> features;
  /// transition[s][p1][p2] -> n_states probabilities.
  std::vector<std::vector<std::vector<Vec>>> transition;

  std::string to_json() const;
  static FiniteMarkovGame from_json(const std::string& text);
};

/// Simplex-embedded MarkovGame over the finite description.
MarkovGame to_markov_game(const FiniteMarkovGame& fmg);

}  // namespace igt
