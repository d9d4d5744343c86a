#include "igt/simulacra.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace igt {

ObservationMap ObservationMap::state_only() {
  ObservationMap m;
  m.kind = Kind::StateOnly;
  return m;
}

ObservationMap ObservationMap::aggregate_actions(std::vector<Index> players) {
  ObservationMap m;
  m.kind = Kind::AggregateActions;
  m.players = std::move(players);
  return m;
}

ObservationMap ObservationMap::coordinate_subset(std::vector<Index> coords) {
  ObservationMap m;
  m.kind = Kind::CoordinateSubset;
  m.coords = std::move(coords);
  return m;
}

namespace {

Index state_dim(const MarkovGame& game) {
  return game.finite() ? 1 : game.state_space.dim();
}

Vec state_coords(const MarkovGame& game, const State& s) {
  if (game.finite()) return Vec::Constant(1, static_cast<double>(s.idx));
  return s.vec;
}

std::vector<Index> aggregate_players(const ObservationMap& map, const MarkovGame& game) {
  if (!map.players.empty()) return map.players;
  std::vector<Index> all;
  for (Index i = 0; i < game.n_players; ++i) all.push_back(i);
  return all;
}

Index aggregate_dim(const ObservationMap& map, const MarkovGame& game) {
  const auto players = aggregate_players(map, game);
  const Index d = game.action_block_dim(players.front());
  for (Index p : players)
    if (game.action_block_dim(p) != d)
      throw std::invalid_argument(
          "ObservationMap: AggregateActions requires equal action dimensions");
  return d;
}

}  // namespace

Index ObservationMap::out_dim(const MarkovGame& game, int horizon) const {
  switch (kind) {
    case Kind::Identity:
      return horizon * (state_dim(game) + game.action_dim());
    case Kind::StateOnly:
      return horizon * state_dim(game);
    case Kind::AggregateActions:
      return horizon * aggregate_dim(*this, game);
    case Kind::CoordinateSubset:
      return horizon * static_cast<Index>(coords.size());
    case Kind::Custom:
      return custom_dim;
  }
  throw std::logic_error("ObservationMap::out_dim");
}

Vec ObservationMap::apply(const MarkovGame& game, const History& h) const {
  const int horizon = h.horizon();
  switch (kind) {
    case Kind::Identity: {
      const Index per = state_dim(game) + game.action_dim();
      Vec o(horizon * per);
      for (int t = 0; t < horizon; ++t) {
        o.segment(t * per, state_dim(game)) =
            state_coords(game, h.states[static_cast<std::size_t>(t)]);
        o.segment(t * per + state_dim(game), game.action_dim()) = h.actions.row(t).transpose();
      }
      return o;
    }
    case Kind::StateOnly: {
      const Index per = state_dim(game);
      Vec o(horizon * per);
      for (int t = 0; t < horizon; ++t)
        o.segment(t * per, per) = state_coords(game, h.states[static_cast<std::size_t>(t)]);
      return o;
    }
    case Kind::AggregateActions: {
      const auto players = aggregate_players(*this, game);
      const Index per = aggregate_dim(*this, game);
      Vec o = Vec::Zero(horizon * per);
      for (int t = 0; t < horizon; ++t)
        for (Index p : players)
          o.segment(t * per, per) +=
              h.actions.row(t).segment(game.action_offsets[p], per).transpose();
      return o;
    }
    case Kind::CoordinateSubset: {
      const Index per = static_cast<Index>(coords.size());
      Vec o(horizon * per);
      for (int t = 0; t < horizon; ++t) {
        Vec step(state_dim(game) + game.action_dim());
        step << state_coords(game, h.states[static_cast<std::size_t>(t)]),
            h.actions.row(t).transpose();
        for (Index k = 0; k < per; ++k) o[t * per + k] = step[coords[static_cast<std::size_t>(k)]];
      }
      return o;
    }
    case Kind::Custom:
      return custom(game, h);
  }
  throw std::logic_error("ObservationMap::apply");
}

Vec ObservationMap::backprop_action(const MarkovGame& game, const History& h, int t,
                                    const Vec& dl_dobs) const {
  const Index a_dim = game.action_dim();
  switch (kind) {
    case Kind::Identity: {
      const Index per = state_dim(game) + a_dim;
      return dl_dobs.segment(t * per + state_dim(game), a_dim);
    }
    case Kind::StateOnly:
      return Vec::Zero(a_dim);
    case Kind::AggregateActions: {
      const auto players = aggregate_players(*this, game);
      const Index per = aggregate_dim(*this, game);
      Vec g = Vec::Zero(a_dim);
      for (Index p : players)
        g.segment(game.action_offsets[p], per) = dl_dobs.segment(t * per, per);
      return g;
    }
    case Kind::CoordinateSubset: {
      const Index per = static_cast<Index>(coords.size());
      Vec g = Vec::Zero(a_dim);
      for (Index k = 0; k < per; ++k) {
        const Index c = coords[static_cast<std::size_t>(k)];
        if (c >= state_dim(game)) g[c - state_dim(game)] += dl_dobs[t * per + k];
      }
      return g;
    }
    case Kind::Custom:
      return custom_bp_action ? custom_bp_action(game, h, t, dl_dobs) : Vec::Zero(a_dim);
  }
  throw std::logic_error("ObservationMap::backprop_action");
}

Vec ObservationMap::backprop_state(const MarkovGame& game, const History& h, int t,
                                   const Vec& dl_dobs) const {
  const Index s_dim = state_dim(game);
  switch (kind) {
    case Kind::Identity: {
      const Index per = s_dim + game.action_dim();
      return dl_dobs.segment(t * per, s_dim);
    }
    case Kind::StateOnly:
      return dl_dobs.segment(t * s_dim, s_dim);
    case Kind::AggregateActions:
      return Vec::Zero(s_dim);
    case Kind::CoordinateSubset: {
      const Index per = static_cast<Index>(coords.size());
      Vec g = Vec::Zero(s_dim);
      for (Index k = 0; k < per; ++k) {
        const Index c = coords[static_cast<std::size_t>(k)];
        if (c < s_dim) g[c] += dl_dobs[t * per + k];
      }
      return g;
    }
    case Kind::Custom:
      return custom_bp_state ? custom_bp_state(game, h, t, dl_dobs) : Vec::Zero(s_dim);
  }
  throw std::logic_error("ObservationMap::backprop_state");
}

namespace {

// (1/K) sum_k ||o - o_k||^2 and its o-gradient via cached moments.
struct SampleMoments {
  Vec mean;
  double mean_sq = 0.0;
  explicit SampleMoments(const Mat& samples) {
    mean = samples.colwise().mean().transpose();
    mean_sq = samples.array().square().rowwise().sum().mean();
  }
  double loss(const Vec& o) const { return o.squaredNorm() - 2.0 * o.dot(mean) + mean_sq; }
  Vec grad(const Vec& o) const { return 2.0 * (o - mean); }
};

std::vector<ActionSource> all_param_sources(const PolicyClass& pc, Index players,
                                            Index xi_base) {
  std::vector<ActionSource> sources;
  for (Index p = 0; p < players; ++p) {
    ActionSource src;
    src.pc_player = p;
    src.xi_offset = xi_base + pc.param_offsets[p];
    sources.push_back(std::move(src));
  }
  return sources;
}

}  // namespace

LossComponents empirical_loss(const InverseSimulation& sim, const PolicyClass& pc,
                              const Vec& theta, const Vec& x, const Vec& y, int batch,
                              int horizon, Rng& rng) {
  const MarkovGame& game = sim.form;
  const SampleMoments moments(sim.samples);
  const std::vector<FixedPolicy> pol_x = freeze_policies(pc, x);
  LossComponents out;
  for (int b = 0; b < batch; ++b) {
    Rng batch_rng = rng.substream(static_cast<std::uint64_t>(b) + 1);
    Rng obs_rng = batch_rng.substream(0);
    const History h_x = simulate(game, pol_x, horizon, obs_rng);
    out.observation += moments.loss(sim.map.apply(game, h_x));
    const Vec base = discounted_return(game, h_x, theta);
    for (Index i = 0; i < game.n_players; ++i) {
      std::vector<FixedPolicy> pols = pol_x;
      const Vec block = pc.block(y, i);
      pols[static_cast<std::size_t>(i)] = [&pc, block, i](const State& s) {
        return pc.act(block, s, i);
      };
      Rng dev_rng = batch_rng.substream(static_cast<std::uint64_t>(i) + 1);
      const History h_dev = simulate(game, pols, horizon, dev_rng);
      out.regret += discounted_return(game, h_dev, theta)[i] - base[i];
    }
  }
  out.observation /= batch;
  out.regret /= batch;
  return out;
}

namespace {

struct SimulacraGradients {
  Vec g_theta, g_x, g_y;
  double obs_value = 0.0, regret_value = 0.0;
};

// One batch of Alg-3 gradient estimates at (theta, x, y).
SimulacraGradients estimate_gradients(const InverseSimulation& sim, const PolicyClass& pc,
                                      const SampleMoments& moments, const Vec& theta,
                                      const Vec& x, const Vec& y, double alpha, double beta,
                                      int batch, int horizon, Rng& rng) {
  const MarkovGame& game = sim.form;
  const Index xd = pc.param_dim();
  SimulacraGradients out;
  out.g_theta = Vec::Zero(theta.size());
  out.g_x = Vec::Zero(xd);
  out.g_y = Vec::Zero(xd);

  Vec xi(2 * xd);
  xi << x, y;

  for (int b = 0; b < batch; ++b) {
    Rng batch_rng = rng.substream(static_cast<std::uint64_t>(b) + 1);

    // Observation rollout under pi^x, differentiable in x.
    Rng obs_rng = batch_rng.substream(0);
    const DiffRollout roll_x =
        rollout_with_grads(game, pc, all_param_sources(pc, game.n_players, 0), xi, horizon,
                           obs_rng);
    const Vec o = sim.map.apply(game, roll_x.h);
    out.obs_value += moments.loss(o);
    const Vec dl_do = moments.grad(o);
    Vec obs_grad = Vec::Zero(2 * xd);
    for (int t = 0; t < horizon; ++t) {
      obs_grad += roll_x.da_dxi[static_cast<std::size_t>(t)].transpose() *
                  sim.map.backprop_action(game, roll_x.h, t, dl_do);
      if (!game.finite())
        obs_grad += roll_x.ds_dxi[static_cast<std::size_t>(t)].transpose() *
                    sim.map.backprop_state(game, roll_x.h, t, dl_do);
    }
    if (game.finite()) {
      // Full-loss likelihood-ratio term for the sampled state path.
      const double l = moments.loss(o);
      for (const Vec& w : roll_x.scores) obs_grad += l * w;
    }
    out.g_x += alpha * obs_grad.head(xd);

    // Equilibrium-candidate returns enter the regret with a minus sign.
    const Vec base = discounted_return(game, roll_x.h, theta);
    for (Index i = 0; i < game.n_players; ++i) {
      out.g_x -= beta * return_grad_xi(game, roll_x, theta, i).head(xd);
      out.g_theta -= beta * [&] {
        double disc = 1.0;
        Vec g = Vec::Zero(theta.size());
        for (int t = 0; t < horizon; ++t) {
          g += disc * game.grad_reward_theta(roll_x.h.states[static_cast<std::size_t>(t)],
                                             roll_x.h.actions.row(t).transpose(), theta, i);
          disc *= game.discount;
        }
        return g;
      }();
    }

    // Per-player deviation rollouts (pi_i^y, pi_{-i}^x).
    for (Index i = 0; i < game.n_players; ++i) {
      std::vector<ActionSource> sources = all_param_sources(pc, game.n_players, 0);
      sources[static_cast<std::size_t>(i)].xi_offset = xd + pc.param_offsets[i];
      Rng dev_rng = batch_rng.substream(static_cast<std::uint64_t>(i) + 1);
      const DiffRollout roll = rollout_with_grads(game, pc, sources, xi, horizon, dev_rng);
      out.regret_value += discounted_return(game, roll.h, theta)[i] - base[i];
      const Vec g_full = return_grad_xi(game, roll, theta, i);
      out.g_x += beta * g_full.head(xd);
      out.g_y.segment(pc.param_offsets[i], pc.block_dim(i)) +=
          beta * g_full.segment(xd + pc.param_offsets[i], pc.block_dim(i));
      double disc = 1.0;
      for (int t = 0; t < horizon; ++t) {
        out.g_theta += beta * disc *
                       game.grad_reward_theta(roll.h.states[static_cast<std::size_t>(t)],
                                              roll.h.actions.row(t).transpose(), theta, i);
        disc *= game.discount;
      }
    }
  }
  const double inv_b = 1.0 / batch;
  out.g_theta *= inv_b;
  out.g_x *= inv_b;
  out.g_y *= inv_b;
  out.obs_value *= inv_b;
  out.regret_value *= inv_b;
  return out;
}

}  // namespace

double moreau_stationarity(const std::function<double(const Vec&)>& phi,
                           const std::function<Vec(const Vec&)>& grad_phi, const Space& domain,
                           const Vec& z, double lambda, int prox_iters) {
  Vec z_prox = z;
  double best = phi(z);  // proximal objective at z' = z
  Vec z_best = z;
  const double eta = 0.25 / std::max(lambda, 1e-12);
  for (int k = 0; k < prox_iters; ++k) {
    const Vec g = grad_phi(z_prox) + 2.0 * lambda * (z_prox - z);
    if (!g.allFinite()) throw std::runtime_error("moreau_stationarity: non-finite inner solve");
    z_prox = project(domain, z_prox - eta * g);
    const double val = phi(z_prox) + lambda * (z_prox - z).squaredNorm();
    if (val < best) {
      best = val;
      z_best = z_prox;
    }
  }
  return 2.0 * lambda * (z - z_best).norm();
}

SimulacraTrace simulacral_solve(const InverseSimulation& sim, const PolicyClass& pc,
                                const SimulacraConfig& cfg) {
  const MarkovGame& game = sim.form;
  const auto t0 = std::chrono::steady_clock::now();
  SimulacraTrace trace;
  trace.horizon = cfg.horizon > 0
                      ? cfg.horizon
                      : horizon_for_tail(game.discount, cfg.r_max, cfg.eps_tail);
  const int H = trace.horizon;
  if (sim.samples.cols() != sim.map.out_dim(game, H))
    throw std::invalid_argument("simulacral_solve: sample dimension does not match the map");

  const SampleMoments moments(sim.samples);
  const Rng root(cfg.seed);

  Vec theta = project(game.param_space, cfg.theta0);
  Vec x = project(pc.param_space, cfg.x0);
  Vec y = project(pc.param_space, cfg.y0.size() ? cfg.y0 : cfg.x0);

  // phi(z) for the stationarity surrogate: z = [theta; x], inner max over y
  // approximated by ascent steps, all with common random numbers.
  auto phi_parts = [&](const Vec& z, Rng rng_in) {
    const Vec th = z.head(theta.size());
    Vec xx = z.tail(pc.param_dim());
    Vec yy = y;
    for (int k = 0; k < cfg.inner_max_iters; ++k) {
      Rng it = rng_in.substream(static_cast<std::uint64_t>(k) + 1);
      const SimulacraGradients g = estimate_gradients(sim, pc, moments, th, xx, yy, cfg.alpha,
                                                      cfg.beta, 1, H, it);
      yy = project(pc.param_space, yy + cfg.eta_y * g.g_y);
    }
    Rng fin = rng_in.substream(0xF1);
    const SimulacraGradients g = estimate_gradients(sim, pc, moments, th, xx, yy, cfg.alpha,
                                                    cfg.beta, cfg.batch, H, fin);
    return std::make_tuple(cfg.alpha * g.obs_value + cfg.beta * g.regret_value,
                           Vec(g.g_theta), Vec(g.g_x));
  };
  Rng phi_rng = root.substream(0x9E);
  auto phi = [&](const Vec& z) { return std::get<0>(phi_parts(z, phi_rng)); };
  auto grad_phi = [&](const Vec& z) {
    auto parts = phi_parts(z, phi_rng);
    Vec g(z.size());
    g << std::get<1>(parts), std::get<2>(parts);
    return g;
  };

  std::vector<Space> domain_factors = {game.param_space, pc.param_space};
  const Space z_domain = Space::product(domain_factors);

  double lambda = cfg.prox_weight;
  if (lambda <= 0.0) {
    // Finite-difference smoothness probe at the start point.
    Vec z0(theta.size() + x.size());
    z0 << theta, x;
    const Vec g0 = grad_phi(z0);
    Vec dz = Vec::Constant(z0.size(), 1e-3);
    const Vec g1 = grad_phi(project(z_domain, z0 + dz));
    const double l_est = (g1 - g0).norm() / dz.norm();
    lambda = std::max(2.0 * l_est, 1.0);
  }
  trace.prox_weight = lambda;

  double best_stat = std::numeric_limits<double>::infinity();

  for (int t = 0; t < cfg.iters; ++t) {
    Rng iter_rng = root.substream(static_cast<std::uint64_t>(t) + 1);
    const SimulacraGradients g = estimate_gradients(sim, pc, moments, theta, x, y, cfg.alpha,
                                                    cfg.beta, cfg.batch, H, iter_rng);
    trace.obs_curve.push_back(g.obs_value);
    trace.regret_curve.push_back(g.regret_value);
    if (!g.g_theta.allFinite() || !g.g_x.allFinite() || !g.g_y.allFinite())
      throw std::runtime_error("simulacral_solve: non-finite gradient estimate at iteration " +
                               std::to_string(t));
    theta = project(game.param_space, theta - cfg.eta_theta * g.g_theta);
    x = project(pc.param_space, x - cfg.eta_x * g.g_x);
    y = project(pc.param_space, y + cfg.eta_y * g.g_y);

    const bool probe = (t + 1) % std::max(1, cfg.stationarity_stride) == 0 ||
                       t + 1 == cfg.iters;
    if (probe) {
      Vec z(theta.size() + x.size());
      z << theta, x;
      const double stat =
          moreau_stationarity(phi, grad_phi, z_domain, z, lambda, cfg.prox_iters);
      trace.stationarity_curve.emplace_back(t + 1, stat);
      if (stat < best_stat) {
        best_stat = stat;
        trace.theta_best = theta;
        trace.x_best = x;
      }
    }
  }

  trace.stationarity_best = best_stat;
  trace.theta_last = theta;
  trace.x_last = x;
  trace.y_last = y;
  trace.iters_used = cfg.iters;
  if (trace.theta_best.size() == 0) {
    trace.theta_best = theta;
    trace.x_best = x;
  }

  // Reported loss at the best iterate, with the regret term maximized by a
  // fresh ascent from the final y.
  Rng report_rng = root.substream(0xBE57);
  Vec y_report = y;
  for (int k = 0; k < cfg.inner_max_iters; ++k) {
    Rng it = report_rng.substream(static_cast<std::uint64_t>(k) + 1);
    const SimulacraGradients g = estimate_gradients(sim, pc, moments, trace.theta_best,
                                                    trace.x_best, y_report, cfg.alpha, cfg.beta,
                                                    1, H, it);
    y_report = project(pc.param_space, y_report + cfg.eta_y * g.g_y);
  }
  Rng final_rng = report_rng.substream(0xF2);
  trace.final_loss = empirical_loss(sim, pc, trace.theta_best, trace.x_best, y_report,
                                    cfg.loss_samples, H, final_rng);
  trace.final_regret_certificate = std::max(0.0, trace.final_loss.regret);
  trace.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return trace;
}

void write_observations_csv(const Mat& samples, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_observations_csv: cannot open " + path);
  out.precision(17);
  for (Index r = 0; r < samples.rows(); ++r) {
    for (Index c = 0; c < samples.cols(); ++c) {
      if (c) out << ',';
      out << samples(r, c);
    }
    out << '\n';
  }
}

Mat read_observations_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_observations_csv: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::runtime_error("read_observations_csv: bad value at line " +
                                 std::to_string(line_no));
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error("read_observations_csv: ragged row at line " +
                               std::to_string(line_no));
    rows.push_back(std::move(row));
  }
  Mat out(static_cast<Index>(rows.size()),
          rows.empty() ? 0 : static_cast<Index>(rows.front().size()));
  for (Index r = 0; r < out.rows(); ++r)
    for (Index c = 0; c < out.cols(); ++c)
      out(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  return out;
}

void write_loss_curves_csv(const SimulacraTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_loss_curves_csv: cannot open " + path);
  out << "iter,observation_term,regret_term\n";
  out.precision(17);
  for (std::size_t t = 0; t < trace.obs_curve.size(); ++t)
    out << t << ',' << trace.obs_curve[t] << ',' << trace.regret_curve[t] << '\n';
}

}  // namespace igt
