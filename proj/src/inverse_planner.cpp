#include "igt/inverse_planner.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "igt/oligopoly.hpp"

namespace igt {

double cumulative_regret(const ParametricGame& game, const Vec& theta, const Vec& x,
                         const Vec& y) {
  const Vec base = game.payoff(x, theta);
  double regret = 0.0;
  for (Index i = 0; i < game.n_players; ++i) {
    const Vec dev = game.with_block(x, i, y.segment(game.offsets[i], game.block_dim(i)));
    regret += game.payoff(dev, theta)[i] - base[i];
  }
  return regret;
}

namespace {

// max over a uniform grid of the deviating player's payoff; ties toward the
// lowest index. Only 1-d blocks (price/quantity games) use grids.
Vec grid_argmax(const ParametricGame& game, const Vec& theta, const Vec& x, Index i) {
  const Space& s = game.strategy_spaces[i];
  if (s.dim() != 1 || s.kind() != Space::Kind::Box)
    throw std::invalid_argument("grid best response requires 1-d box strategy spaces");
  const double lo = s.lower()[0];
  const double hi = std::min(s.upper()[0], game.grid_hi);
  double best_val = -std::numeric_limits<double>::infinity();
  double best_y = lo;
  for (int k = 0; k < kBertrandGridPoints; ++k) {
    const double y = lo + (hi - lo) * static_cast<double>(k) / (kBertrandGridPoints - 1);
    const Vec dev = game.with_block(x, i, Vec::Constant(1, y));
    const double v = game.payoff(dev, theta)[i];
    if (v > best_val) {
      best_val = v;
      best_y = y;
    }
  }
  return Vec::Constant(1, best_y);
}

Vec pga_argmax(const ParametricGame& game, const Vec& theta, const Vec& x, Index i,
               int restarts = 8, int steps = 2000) {
  const Space& s = game.strategy_spaces[i];
  Rng rng(0xE1);  // fixed stream: exploitability is a pure function
  Vec best = x.segment(game.offsets[i], game.block_dim(i));
  double best_val = game.payoff(x, theta)[i];
  const double diam = s.bounded() ? (s.kind() == Space::Kind::Simplex
                                         ? 2.0 * s.scale()
                                         : (s.upper() - s.lower()).norm())
                                  : 1.0;
  for (int r = 0; r < restarts; ++r) {
    Vec y = r == 0 ? best : sample_uniform(s, rng);
    for (int t = 1; t <= steps; ++t) {
      const Vec dev = game.with_block(x, i, y);
      Vec g = game.grad_payoff_x(dev, theta, i);
      const double gn = g.norm();
      if (gn < 1e-14) break;
      y = project(s, y + (0.1 * diam / std::sqrt(static_cast<double>(t))) * g / gn);
    }
    const Vec dev = game.with_block(x, i, y);
    const double v = game.payoff(dev, theta)[i];
    if (v > best_val) {
      best_val = v;
      best = y;
    }
  }
  return best;
}

Vec inner_argmax(const ParametricGame& game, const Vec& theta, const Vec& x, Index i) {
  switch (game.br_method) {
    case BestResponseMethod::ClosedForm:
      return game.best_response(x, theta, i);
    case BestResponseMethod::Grid:
      return grid_argmax(game, theta, x, i);
    case BestResponseMethod::GradientAscent:
      return pga_argmax(game, theta, x, i);
  }
  throw std::logic_error("inner_argmax: unknown method");
}

}  // namespace

Exploitability exploitability(const ParametricGame& game, const Vec& theta, const Vec& x) {
  Exploitability out;
  out.deviation = x;
  out.method = to_string(game.br_method);
  const Vec base = game.payoff(x, theta);
  for (Index i = 0; i < game.n_players; ++i) {
    Vec y_i = inner_argmax(game, theta, x, i);
    const Vec dev = game.with_block(x, i, y_i);
    const double gain = game.payoff(dev, theta)[i] - base[i];
    if (gain > 0.0) {
      out.value += gain;
      out.deviation.segment(game.offsets[i], game.block_dim(i)) = y_i;
    }
  }
  return out;
}

SolveTrace gda_solve(const InverseGame& inv, const GdaConfig& cfg) {
  const ParametricGame& game = inv.form;
  const Vec& x_hat = inv.observed.flat;
  const Space& theta_space = game.param_space;
  const Space y_space = game.joint_strategy_space();

  if (cfg.theta0.size() != theta_space.dim())
    throw std::invalid_argument("gda_solve: theta0 dimension mismatch");
  if (cfg.y0.size() != y_space.dim())
    throw std::invalid_argument("gda_solve: y0 dimension mismatch");

  const auto t_start = std::chrono::steady_clock::now();
  Vec theta = project(theta_space, cfg.theta0);
  Vec y = project(y_space, cfg.y0);
  Vec theta_sum = theta;
  int n_avg = 1;

  SolveTrace trace;
  trace.f_values.reserve(static_cast<std::size_t>(cfg.iters));
  const Vec base_grad_theta_dim = Vec::Zero(theta.size());

  auto store = [&](int iter, const Vec& th, const Vec& yy) {
    trace.trace_iters.push_back(iter);
    trace.thetas.conservativeResize(trace.thetas.rows() + 1, th.size());
    trace.thetas.row(trace.thetas.rows() - 1) = th.transpose();
    trace.ys.conservativeResize(trace.ys.rows() + 1, yy.size());
    trace.ys.row(trace.ys.rows() - 1) = yy.transpose();
    trace.exploit_running.push_back(exploitability(game, th, x_hat).value);
  };

  if (cfg.trace_stride > 0) store(0, theta, y);

  bool stopped = false;
  int t = 0;
  for (; t < cfg.iters; ++t) {
    // f(theta, y) = sum_i u_i(y_i, x_{-i}; theta) - u_i(x_hat; theta)
    Vec grad_theta = base_grad_theta_dim;
    double f_val = 0.0;
    const Vec base = game.payoff(x_hat, theta);
    for (Index i = 0; i < game.n_players; ++i) {
      const Vec dev =
          game.with_block(x_hat, i, y.segment(game.offsets[i], game.block_dim(i)));
      f_val += game.payoff(dev, theta)[i] - base[i];
      grad_theta += game.grad_payoff_theta(dev, theta, i);
      grad_theta -= game.grad_payoff_theta(x_hat, theta, i);
    }
    trace.f_values.push_back(f_val);

    Vec y_next(y.size());
    if (game.br_method == BestResponseMethod::Grid) {
      // Discontinuous payoffs: the destabilizer plays the grid argmax.
      for (Index i = 0; i < game.n_players; ++i)
        y_next.segment(game.offsets[i], game.block_dim(i)) =
            grid_argmax(game, theta, x_hat, i);
    } else {
      for (Index i = 0; i < game.n_players; ++i) {
        const Vec y_i = y.segment(game.offsets[i], game.block_dim(i));
        const Vec dev = game.with_block(x_hat, i, y_i);
        const Vec g_i = game.grad_payoff_x(dev, theta, i);
        if (!g_i.allFinite()) {
          std::ostringstream os;
          os << "gda_solve: non-finite y-gradient at iteration " << t << " (player " << i
             << "), y = [" << y.transpose() << "]";
          throw std::runtime_error(os.str());
        }
        if (!game.smooth_payoffs) {
          y_next.segment(game.offsets[i], game.block_dim(i)) =
              project(game.strategy_spaces[i], y_i + cfg.eta_y * g_i);
          continue;
        }
        // Safeguarded ascent: log-barrier payoffs have cliff gradients near
        // zero utility, so the raw eta_y step can overshoot by orders of
        // magnitude. Scan the halving ladder along the same direction and
        // take the best payoff; no move if nothing improves.
        const double base_val = game.payoff(dev, theta)[i];
        double best_val = base_val;
        Vec best_y = y_i;
        double prev = -std::numeric_limits<double>::infinity();
        double scale = 1.0;
        for (int bt = 0; bt < 40; ++bt, scale *= 0.5) {
          const Vec cand = project(game.strategy_spaces[i], y_i + scale * cfg.eta_y * g_i);
          const double v = game.payoff(game.with_block(x_hat, i, cand), theta)[i];
          if (v > best_val) {
            best_val = v;
            best_y = cand;
          }
          if (best_val > base_val && v < prev) break;  // past the ladder's peak
          prev = v;
        }
        y_next.segment(game.offsets[i], game.block_dim(i)) = best_y;
      }
    }
    if (!grad_theta.allFinite()) {
      std::ostringstream os;
      os << "gda_solve: non-finite theta-gradient at iteration " << t << ", theta = ["
         << theta.transpose() << "]";
      throw std::runtime_error(os.str());
    }

    theta = project(theta_space, theta - cfg.eta_theta * grad_theta);
    y = y_next;
    theta_sum += theta;
    ++n_avg;

    if (cfg.trace_stride > 0 && ((t + 1) % cfg.trace_stride == 0 || t + 1 == cfg.iters))
      store(t + 1, theta, y);

    if (cfg.theta_star && cfg.stop_rel_tol > 0.0) {
      const Vec rel = (theta - *cfg.theta_star).cwiseQuotient(*cfg.theta_star);
      if (rel.norm() <= cfg.stop_rel_tol) {
        stopped = true;
        ++t;
        break;
      }
    }
  }

  trace.iters_used = t;
  trace.early_stopped = stopped;
  trace.theta_bar = theta_sum / static_cast<double>(n_avg);
  trace.theta_last = theta;
  trace.y_last = y;
  trace.theta_hat = stopped ? theta : (cfg.average ? trace.theta_bar : theta);

  if (cfg.polish_iters > 0 && !stopped &&
      game.br_method != BestResponseMethod::GradientAscent) {
    // Subgradient descent on the exploitability of x_hat with Polyak steps
    // (its minimum is zero whenever the observed profile is rationalizable).
    Vec z = theta;
    Vec z_best = z;
    double phi_best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < cfg.polish_iters; ++k) {
      double phi = 0.0;
      Vec grad = Vec::Zero(z.size());
      const Vec base = game.payoff(x_hat, z);
      for (Index i = 0; i < game.n_players; ++i) {
        const Vec y_i = inner_argmax(game, z, x_hat, i);
        const Vec dev = game.with_block(x_hat, i, y_i);
        const double gain = game.payoff(dev, z)[i] - base[i];
        if (gain <= 0.0) continue;
        phi += gain;
        grad += game.grad_payoff_theta(dev, z, i) - game.grad_payoff_theta(x_hat, z, i);
      }
      if (phi < phi_best) {
        phi_best = phi;
        z_best = z;
      }
      const double gnorm2 = grad.squaredNorm();
      if (phi <= 0.0 || gnorm2 < 1e-24) break;
      z = project(theta_space, z - (phi / gnorm2) * grad);
    }
    trace.theta_hat = z_best;
  }
  const Exploitability cert = exploitability(game, trace.theta_hat, x_hat);
  trace.certificate = cert.value;
  trace.certificate_deviation = cert.deviation;
  trace.certificate_method = cert.method;
  trace.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                            t_start)
                      .count();
  return trace;
}

Vec average_iterates(const Mat& thetas) {
  if (thetas.rows() == 0) throw std::invalid_argument("average_iterates: empty trace");
  return thetas.colwise().mean().transpose();
}

void write_trace_csv(const SolveTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_trace_csv: cannot open " + path);
  out << "iter,f_value";
  const Index d = trace.thetas.cols();
  for (Index j = 0; j < d; ++j) out << ",theta" << j;
  out << ",exploitability_running\n";
  out.precision(17);
  for (std::size_t r = 0; r < trace.trace_iters.size(); ++r) {
    const int it = trace.trace_iters[r];
    const double f =
        it == 0 ? (trace.f_values.empty() ? 0.0 : trace.f_values.front())
                : trace.f_values[static_cast<std::size_t>(it - 1)];
    out << it << ',' << f;
    for (Index j = 0; j < d; ++j) out << ',' << trace.thetas(static_cast<Index>(r), j);
    out << ',' << trace.exploit_running[r] << '\n';
  }
}

std::string trace_summary_json(const SolveTrace& trace) {
  nlohmann::json j;
  j["theta_bar"] = std::vector<double>(trace.theta_bar.data(),
                                       trace.theta_bar.data() + trace.theta_bar.size());
  j["theta_hat"] = std::vector<double>(trace.theta_hat.data(),
                                       trace.theta_hat.data() + trace.theta_hat.size());
  j["certificate"] = trace.certificate;
  j["certificate_method"] = trace.certificate_method;
  j["iters"] = trace.iters_used;
  j["early_stopped"] = trace.early_stopped;
  j["wall_ms"] = trace.wall_ms;
  return j.dump(2);
}

}  // namespace igt
