#pragma once

#include <optional>
#include <string>
#include <vector>

#include "igt/games.hpp"
#include "igt/types.hpp"

namespace igt {

/// Sum over players of the payoff gain from unilaterally deviating from x to
/// the corresponding block of y.
double cumulative_regret(const ParametricGame& game, const Vec& theta, const Vec& x,
                         const Vec& y);

struct Exploitability {
  double value = 0.0;
  Vec deviation;  // argmax profile, one block per player
  std::string method;
};

/// max_y cumulative_regret(x, y; theta), solved per player independently via
/// the game's best-response method (closed form, price grid, or projected
/// gradient ascent with restarts). The no-deviation candidate is always
/// included, so the value is never negative.
Exploitability exploitability(const ParametricGame& game, const Vec& theta, const Vec& x);

/// Projected gradient descent ascent on the inverse-NE objective.
struct GdaConfig {
  double eta_theta = 0.01;
  double eta_y = 0.01;
  int iters = 5000;
  Vec theta0;
  Vec y0;
  /// Relative-L2 distance to theta_star that stops a benchmark run early;
  /// 0 disables. Ignored unless theta_star is set.
  double stop_rel_tol = 0.1;
  bool average = true;
  std::optional<Vec> theta_star;  // benchmark mode only
  /// Store (theta, duality diagnostics) every trace_stride iterations;
  /// 0 keeps only objective values.
  int trace_stride = 0;
  /// Extra exact-inner-max descent steps after the main loop (Polyak step
  /// sizes against the zero optimum of the inverse-NE objective); 0 skips.
  /// Requires a closed-form or grid best response.
  int polish_iters = 0;
};

struct SolveTrace {
  std::vector<double> f_values;          // objective at every iteration
  std::vector<int> trace_iters;          // iterations with stored iterates
  Mat thetas;                            // stored theta iterates (rows)
  Mat ys;                                // stored y iterates (rows)
  std::vector<double> exploit_running;   // certificate at stored iterates
  Vec theta_bar;                         // time-average including theta0
  Vec theta_last;
  Vec y_last;
  double certificate = 0.0;              // exploitability(x_hat; theta_hat)
  Vec certificate_deviation;
  std::string certificate_method;
  int iters_used = 0;
  bool early_stopped = false;
  double wall_ms = 0.0;

  /// Early-stop iterate when stopped, otherwise the Theorem-2 average.
  Vec theta_hat;
};

/// Algorithm: simultaneous projected steps
///   theta <- proj_Theta(theta - eta * grad_theta f),
///   y     <- proj_X(y + eta * grad_y f)
/// on f(theta, y) = cumulative_regret(x_hat, y; theta). Grid-method games
/// replace the y gradient step with the grid argmax. Throws on non-finite
/// gradients with the iteration and iterate in the message.
SolveTrace gda_solve(const InverseGame& inv, const GdaConfig& cfg);

/// Arithmetic mean of stored theta iterates (theta0 included).
Vec average_iterates(const Mat& thetas);

/// CSV rows (iter, f_value, theta..., exploitability_running) at stored
/// iterations, plus a JSON summary {theta_bar, certificate, iters, wall_ms}.
void write_trace_csv(const SolveTrace& trace, const std::string& path);
std::string trace_summary_json(const SolveTrace& trace);

}  // namespace igt
