#pragma once

#include <functional>
#include <string>
#include <vector>

#include "igt/markov.hpp"

namespace igt {

/// Possibly lossy map from histories to observation vectors. Built-in kinds
/// are linear in the per-step (state, action) coordinates, so they stay
/// differentiable through simulated histories wherever the rollout is.
/// Finite-state coordinates enter as the state index; their distributional
/// dependence is carried by the likelihood-ratio terms, not the pathwise ones.
struct ObservationMap {
  enum class Kind { Identity, StateOnly, AggregateActions, CoordinateSubset, Custom };
  Kind kind = Kind::Identity;

  /// AggregateActions: players whose (equal-dimension) action blocks are
  /// summed per step; empty means all players.
  std::vector<Index> players;
  /// CoordinateSubset: indices into the per-step [state; action] vector.
  std::vector<Index> coords;

  std::function<Vec(const MarkovGame&, const History&)> custom;
  std::function<Vec(const MarkovGame&, const History&, int t, const Vec& dl_dobs)>
      custom_bp_action;
  std::function<Vec(const MarkovGame&, const History&, int t, const Vec& dl_dobs)>
      custom_bp_state;
  Index custom_dim = 0;

  static ObservationMap identity() { return {}; }
  static ObservationMap state_only();
  static ObservationMap aggregate_actions(std::vector<Index> players = {});
  static ObservationMap coordinate_subset(std::vector<Index> coords);

  Index out_dim(const MarkovGame& game, int horizon) const;
  Vec apply(const MarkovGame& game, const History& h) const;
  /// Chain rule dl/da_t from dl/dobs.
  Vec backprop_action(const MarkovGame& game, const History& h, int t,
                      const Vec& dl_dobs) const;
  /// Chain rule dl/ds_t (continuous-state games).
  Vec backprop_state(const MarkovGame& game, const History& h, int t,
                     const Vec& dl_dobs) const;
};

/// Markov game form with unknown parameters, an observation map, and sampled
/// observations from the unobserved equilibrium.
struct InverseSimulation {
  MarkovGame form;
  ObservationMap map;
  Mat samples;  // K x obs_dim
};

struct SimulacraConfig {
  double alpha = 1.0;
  double beta = 1.0;
  double eta_theta = 1e-3;
  double eta_x = 1e-2;
  double eta_y = 1e-2;
  int iters = 1000;
  int batch = 4;
  int horizon = 0;  // 0: derived from eps_tail / r_max
  double eps_tail = 1e-6;
  double r_max = 1.0;
  Vec theta0, x0, y0;
  std::uint64_t seed = 1;
  /// Moreau prox weight; 0 derives it from a finite-difference smoothness
  /// probe at the start point.
  double prox_weight = 0.0;
  int prox_iters = 30;
  int inner_max_iters = 40;
  /// Evaluate the stationarity surrogate every this many iterations for
  /// best-iterate selection.
  int stationarity_stride = 100;
  int loss_samples = 32;  // rollouts for reported loss values
};

struct LossComponents {
  double observation = 0.0;  // E ||o - o_hat||^2 term (unweighted)
  double regret = 0.0;       // cumulative regret term (unweighted)
  double total(double alpha, double beta) const { return alpha * observation + beta * regret; }
};

/// Monte-Carlo empirical learning loss at (theta, x, y): alpha * observation
/// mismatch of pi^x plus beta * cumulative regret of pi^x against per-player
/// deviations pi_i^y.
LossComponents empirical_loss(const InverseSimulation& sim, const PolicyClass& pc,
                              const Vec& theta, const Vec& x, const Vec& y, int batch,
                              int horizon, Rng& rng);

struct SimulacraTrace {
  std::vector<double> obs_curve, regret_curve;  // per iteration (batch means)
  Vec theta_best, x_best;                       // best iterate by the surrogate
  double stationarity_best = 0.0;
  std::vector<std::pair<int, double>> stationarity_curve;
  Vec theta_last, x_last, y_last;
  LossComponents final_loss;
  double final_regret_certificate = 0.0;  // maximized regret estimate at x_best
  int iters_used = 0;
  int horizon = 0;
  double prox_weight = 0.0;
  double wall_ms = 0.0;
};

/// Three-variable stochastic GDA: theta and x descend, y ascends. Deviation
/// histories use (pi_i^y, pi_{-i}^x), the observation rollout uses pi^x.
SimulacraTrace simulacral_solve(const InverseSimulation& sim, const PolicyClass& pc,
                                const SimulacraConfig& cfg);

/// Proximal-point stationarity surrogate: approximates
/// prox(z) = argmin_z' phi(z') + lambda ||z - z'||^2 with `prox_iters`
/// projected gradient steps, returns 2 * lambda * ||z - prox(z)||.
double moreau_stationarity(const std::function<double(const Vec&)>& phi,
                           const std::function<Vec(const Vec&)>& grad_phi, const Space& domain,
                           const Vec& z, double lambda, int prox_iters);

/// Observation sample files: CSV, one row per sample.
void write_observations_csv(const Mat& samples, const std::string& path);
Mat read_observations_csv(const std::string& path);
void write_loss_curves_csv(const SimulacraTrace& trace, const std::string& path);

}  // namespace igt
