#include "igt/markov.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace igt {

void finalize_action_offsets(MarkovGame& game) {
  game.n_players = static_cast<Index>(game.action_spaces.size());
  game.action_offsets.assign(static_cast<std::size_t>(game.n_players) + 1, 0);
  for (Index i = 0; i < game.n_players; ++i)
    game.action_offsets[i + 1] = game.action_offsets[i] + game.action_spaces[i].dim();
}

void validate_markov_game(const MarkovGame& game, double tol) {
  if (!game.finite()) return;
  if (std::abs(game.init_probs.sum() - 1.0) > tol)
    throw std::invalid_argument("markov game: initial distribution does not sum to 1");
  // Pure action profiles = vertices of the simplex embedding; transition
  // rows are affine per player, so vertex checks cover the whole space.
  std::vector<Index> dims;
  for (const Space& s : game.action_spaces) dims.push_back(s.dim());
  std::vector<Index> idx(dims.size(), 0);
  while (true) {
    Vec a = Vec::Zero(game.action_dim());
    for (std::size_t p = 0; p < dims.size(); ++p)
      a[game.action_offsets[static_cast<Index>(p)] + idx[p]] = 1.0;
    for (int s = 0; s < game.n_states; ++s) {
      const Vec probs = game.transition_probs(State::finite(s), a);
      if (std::abs(probs.sum() - 1.0) > tol)
        throw std::invalid_argument("markov game: transition row does not sum to 1 at state " +
                                    std::to_string(s));
    }
    std::size_t p = 0;
    for (; p < dims.size(); ++p) {
      if (++idx[p] < dims[p]) break;
      idx[p] = 0;
    }
    if (p == dims.size()) break;
  }
}

PolicyClass tabular_policy_class(const MarkovGame& game) {
  if (!game.finite())
    throw std::invalid_argument("tabular_policy_class: finite-state games only");
  PolicyClass pc;
  std::vector<Space> blocks;
  pc.param_offsets.assign(static_cast<std::size_t>(game.n_players) + 1, 0);
  for (Index i = 0; i < game.n_players; ++i) {
    std::vector<Space> per_state(static_cast<std::size_t>(game.n_states),
                                 game.action_spaces[i]);
    blocks.push_back(Space::product(per_state));
    pc.param_offsets[i + 1] = pc.param_offsets[i] + blocks.back().dim();
  }
  pc.param_space = Space::product(blocks);
  const std::vector<Index> action_offsets = game.action_offsets;
  const std::vector<Space> action_spaces = game.action_spaces;
  pc.act = [action_spaces](const Vec& x_i, const State& s, Index i) {
    const Index d = action_spaces[i].dim();
    return Vec(x_i.segment(s.idx * d, d));
  };
  pc.jac_params = [action_spaces](const Vec& x_i, const State& s, Index i) {
    const Index d = action_spaces[i].dim();
    Mat jac = Mat::Zero(d, x_i.size());
    jac.block(0, s.idx * d, d, d).setIdentity();
    return jac;
  };
  return pc;
}

PolicyClass constant_policy_class(const MarkovGame& game) {
  PolicyClass pc;
  pc.param_offsets.assign(static_cast<std::size_t>(game.n_players) + 1, 0);
  std::vector<Space> blocks;
  for (Index i = 0; i < game.n_players; ++i) {
    blocks.push_back(game.action_spaces[i]);
    pc.param_offsets[i + 1] = pc.param_offsets[i] + game.action_spaces[i].dim();
  }
  pc.param_space = Space::product(blocks);
  pc.act = [](const Vec& x_i, const State&, Index) { return x_i; };
  pc.jac_params = [](const Vec& x_i, const State&, Index) {
    return Mat(Mat::Identity(x_i.size(), x_i.size()));
  };
  return pc;
}

std::vector<FixedPolicy> freeze_policies(const PolicyClass& pc, const Vec& x) {
  std::vector<FixedPolicy> out;
  for (Index i = 0; i < static_cast<Index>(pc.param_offsets.size()) - 1; ++i) {
    Vec block = pc.block(x, i);
    out.push_back([&pc, block, i](const State& s) { return pc.act(block, s, i); });
  }
  return out;
}

int horizon_for_tail(double discount, double r_max, double eps_tail) {
  if (discount <= 0.0 || discount >= 1.0)
    throw std::invalid_argument("horizon_for_tail: discount in (0,1) required");
  const double ratio = eps_tail * (1.0 - discount) / std::max(r_max, 1e-300);
  if (ratio >= 1.0) return 1;
  return static_cast<int>(std::ceil(std::log(ratio) / std::log(discount)));
}

namespace {

Vec profile_action(const MarkovGame& game, const std::vector<FixedPolicy>& policies,
                   const State& s) {
  Vec a(game.action_dim());
  for (Index i = 0; i < game.n_players; ++i)
    a.segment(game.action_offsets[i], game.action_block_dim(i)) = policies[i](s);
  return a;
}

}  // namespace

History simulate(const MarkovGame& game, const std::vector<FixedPolicy>& policies, int horizon,
                 Rng& rng) {
  if (horizon < 1) throw std::invalid_argument("simulate: horizon >= 1 required");
  History h;
  h.states.reserve(static_cast<std::size_t>(horizon));
  h.actions.resize(horizon, game.action_dim());
  if (!game.finite()) h.noises.resize(horizon, game.noise_dim);

  State s = game.finite() ? State::finite(rng.categorical(game.init_probs))
                          : State::continuous(game.sample_init(rng));
  for (int t = 0; t < horizon; ++t) {
    const Vec a = profile_action(game, policies, s);
    h.states.push_back(s);
    h.actions.row(t) = a.transpose();
    if (t + 1 == horizon) break;
    if (game.finite()) {
      s = State::finite(rng.categorical(game.transition_probs(s, a)));
    } else {
      Vec noise = game.sample_noise ? game.sample_noise(rng) : Vec::Zero(game.noise_dim);
      h.noises.row(t) = noise.transpose();
      s = State::continuous(game.step(s, a, noise));
    }
  }
  return h;
}

Vec discounted_return(const MarkovGame& game, const History& h, const Vec& theta) {
  if (h.horizon() < 1) throw std::invalid_argument("discounted_return: empty history");
  Vec total = Vec::Zero(game.n_players);
  double disc = 1.0;
  for (int t = 0; t < h.horizon(); ++t) {
    total += disc * game.reward(h.states[static_cast<std::size_t>(t)],
                                h.actions.row(t).transpose(), theta);
    disc *= game.discount;
  }
  return total;
}

Vec grad_estimator_theta(const MarkovGame& game, const std::vector<History>& deviations,
                         const History& equilibrium, const Vec& theta) {
  if (static_cast<Index>(deviations.size()) != game.n_players)
    throw std::invalid_argument("grad_estimator_theta: one deviation history per player");
  Vec grad = Vec::Zero(theta.size());
  for (Index i = 0; i < game.n_players; ++i) {
    const History& h = deviations[static_cast<std::size_t>(i)];
    double disc = 1.0;
    for (int t = 0; t < h.horizon(); ++t) {
      grad += disc * game.grad_reward_theta(h.states[static_cast<std::size_t>(t)],
                                            h.actions.row(t).transpose(), theta, i);
      disc *= game.discount;
    }
    disc = 1.0;
    for (int t = 0; t < equilibrium.horizon(); ++t) {
      grad -= disc * game.grad_reward_theta(equilibrium.states[static_cast<std::size_t>(t)],
                                            equilibrium.actions.row(t).transpose(), theta, i);
      disc *= game.discount;
    }
  }
  return grad;
}

DiffRollout rollout_with_grads(const MarkovGame& game, const PolicyClass& pc,
                               const std::vector<ActionSource>& sources, const Vec& xi,
                               int horizon, Rng& rng) {
  DiffRollout out;
  const Index xi_dim = xi.size();
  out.h.actions.resize(horizon, game.action_dim());
  if (!game.finite()) out.h.noises.resize(horizon, game.noise_dim);
  out.da_dxi.reserve(static_cast<std::size_t>(horizon));

  State s = game.finite() ? State::finite(rng.categorical(game.init_probs))
                          : State::continuous(game.sample_init(rng));
  Mat ds = game.finite() ? Mat() : Mat::Zero(game.state_space.dim(), xi_dim);

  for (int t = 0; t < horizon; ++t) {
    Vec a(game.action_dim());
    Mat da = Mat::Zero(game.action_dim(), xi_dim);
    for (Index p = 0; p < game.n_players; ++p) {
      const ActionSource& src = sources[static_cast<std::size_t>(p)];
      const Index off = game.action_offsets[p];
      const Index dim = game.action_block_dim(p);
      if (src.pc_player < 0) {
        a.segment(off, dim) = src.fixed(s);
        continue;
      }
      const Vec block = xi.segment(src.xi_offset, pc.block_dim(src.pc_player));
      a.segment(off, dim) = pc.act(block, s, src.pc_player);
      da.block(off, src.xi_offset, dim, block.size()) = pc.jac_params(block, s, src.pc_player);
      if (!game.finite() && pc.jac_state)
        da.middleRows(off, dim) += pc.jac_state(block, s, src.pc_player) * ds;
    }
    out.h.states.push_back(s);
    out.h.actions.row(t) = a.transpose();
    out.da_dxi.push_back(da);
    if (!game.finite()) out.ds_dxi.push_back(ds);

    if (t + 1 == horizon) break;
    if (game.finite()) {
      const Vec probs = game.transition_probs(s, a);
      const int next = rng.categorical(probs);
      // d log P(next | s, a) / d xi, used as a likelihood-ratio factor on
      // downstream rewards.
      const Mat dprobs = game.grad_transition_probs(s, a);
      out.scores.push_back(da.transpose() * dprobs.row(next).transpose() /
                           std::max(probs[next], 1e-300));
      s = State::finite(next);
    } else {
      Vec noise = game.sample_noise ? game.sample_noise(rng) : Vec::Zero(game.noise_dim);
      out.h.noises.row(t) = noise.transpose();
      const Mat js = game.jac_step_state(s, a, noise);
      const Mat ja = game.jac_step_action(s, a, noise);
      ds = js * ds + ja * da;
      s = State::continuous(game.step(s, a, noise));
    }
  }
  return out;
}

Vec return_grad_xi(const MarkovGame& game, const DiffRollout& roll, const Vec& theta,
                   Index player) {
  const int horizon = roll.h.horizon();
  const Index xi_dim = roll.da_dxi.front().cols();
  Vec grad = Vec::Zero(xi_dim);

  // Pathwise part.
  double disc = 1.0;
  std::vector<double> reward_t(static_cast<std::size_t>(horizon));
  for (int t = 0; t < horizon; ++t) {
    const State& s = roll.h.states[static_cast<std::size_t>(t)];
    const Vec a = roll.h.actions.row(t).transpose();
    reward_t[static_cast<std::size_t>(t)] = game.reward(s, a, theta)[player];
    grad += disc * (roll.da_dxi[static_cast<std::size_t>(t)].transpose() *
                    game.grad_reward_a(s, a, theta, player));
    if (!game.finite() && game.grad_reward_state)
      grad += disc * (roll.ds_dxi[static_cast<std::size_t>(t)].transpose() *
                      game.grad_reward_state(s, a, theta, player));
    disc *= game.discount;
  }

  // Likelihood-ratio part for sampled discrete transitions: score at step t
  // times the discounted downstream return.
  if (game.finite() && !roll.scores.empty()) {
    double down = 0.0;
    disc = std::pow(game.discount, horizon - 1);
    for (int t = horizon - 2; t >= 0; --t) {
      down += disc * reward_t[static_cast<std::size_t>(t + 1)];
      grad += roll.scores[static_cast<std::size_t>(t)] * down;
      disc /= game.discount;
    }
  }
  return grad;
}

Vec grad_estimator_x(const MarkovGame& game, const PolicyClass& pc, const Vec& x,
                     const std::vector<FixedPolicy>& others, const Vec& theta, int horizon,
                     Rng& rng) {
  if (!game.finite() && !game.step)
    throw std::invalid_argument(
        "grad_estimator_x: game has no differentiable transition; finite games must use the "
        "simplex embedding");
  Vec grad = Vec::Zero(pc.param_dim());
  for (Index i = 0; i < game.n_players; ++i) {
    std::vector<ActionSource> sources;
    for (Index p = 0; p < game.n_players; ++p) {
      ActionSource src;
      if (p == i) {
        src.pc_player = i;
        src.xi_offset = pc.param_offsets[i];
      } else {
        src.fixed = others[static_cast<std::size_t>(p)];
      }
      sources.push_back(std::move(src));
    }
    Rng sub = rng.substream(static_cast<std::uint64_t>(i) + 1);
    const DiffRollout roll = rollout_with_grads(game, pc, sources, x, horizon, sub);
    const Vec g = return_grad_xi(game, roll, theta, i);
    grad.segment(pc.param_offsets[i], pc.block_dim(i)) +=
        g.segment(pc.param_offsets[i], pc.block_dim(i));
  }
  return grad;
}

SgdaTrace sgda_solve(const InverseMarkovGame& inv, const PolicyClass& pc,
                     const SgdaConfig& cfg) {
  const MarkovGame& game = inv.form;
  const auto t0 = std::chrono::steady_clock::now();

  SgdaTrace trace;
  trace.horizon = cfg.horizon > 0
                      ? cfg.horizon
                      : horizon_for_tail(game.discount, cfg.r_max, cfg.eps_tail);
  const int H = trace.horizon;

  double eta_theta = cfg.eta_theta, eta_x = cfg.eta_x;
  if (cfg.theory_rates) {
    eta_x = std::pow(cfg.epsilon, 4);
    eta_theta = std::pow(cfg.epsilon, 8);
  }

  Vec theta = project(game.param_space, cfg.theta0);
  Vec x = project(pc.param_space, cfg.x0);
  Vec theta_sum = theta;
  int n_avg = 1;
  const Rng root(cfg.seed);

  auto store = [&](int iter) {
    trace.trace_iters.push_back(iter);
    trace.thetas.conservativeResize(trace.thetas.rows() + 1, theta.size());
    trace.thetas.row(trace.thetas.rows() - 1) = theta.transpose();
  };
  if (cfg.trace_stride > 0) store(0);

  for (int t = 0; t < cfg.iters; ++t) {
    Rng iter_rng = root.substream(static_cast<std::uint64_t>(t) + 1);
    Vec g_theta = Vec::Zero(theta.size());
    Vec g_x = Vec::Zero(pc.param_dim());
    double f_acc = 0.0;
    for (int b = 0; b < cfg.batch; ++b) {
      Rng batch_rng = iter_rng.substream(static_cast<std::uint64_t>(b));
      // Per-player deviation histories (player i plays pi_i^x, rest at the
      // observed profile) plus one equilibrium history.
      std::vector<History> deviations;
      for (Index i = 0; i < game.n_players; ++i) {
        std::vector<FixedPolicy> pols = inv.observed;
        const Vec block = pc.block(x, i);
        pols[static_cast<std::size_t>(i)] = [&pc, block, i](const State& s) {
          return pc.act(block, s, i);
        };
        Rng dev_rng = batch_rng.substream(static_cast<std::uint64_t>(i) + 1);
        deviations.push_back(simulate(game, pols, H, dev_rng));
      }
      Rng eq_rng = batch_rng.substream(0xEE);
      const History h_eq = simulate(game, inv.observed, H, eq_rng);
      g_theta += grad_estimator_theta(game, deviations, h_eq, theta);
      Rng x_rng = batch_rng.substream(0xAA);
      g_x += grad_estimator_x(game, pc, x, inv.observed, theta, H, x_rng);
      const Vec eq_ret = discounted_return(game, h_eq, theta);
      for (Index i = 0; i < game.n_players; ++i)
        f_acc += discounted_return(game, deviations[static_cast<std::size_t>(i)], theta)[i] -
                 eq_ret[i];
    }
    const double inv_b = 1.0 / static_cast<double>(cfg.batch);
    g_theta *= inv_b;
    g_x *= inv_b;
    trace.f_values.push_back(f_acc * inv_b);
    if (!g_theta.allFinite() || !g_x.allFinite())
      throw std::runtime_error("sgda_solve: non-finite gradient estimate at iteration " +
                               std::to_string(t));
    theta = project(game.param_space, theta - eta_theta * g_theta);
    x = project(pc.param_space, x + eta_x * g_x);
    theta_sum += theta;
    ++n_avg;
    if (cfg.trace_stride > 0 && ((t + 1) % cfg.trace_stride == 0 || t + 1 == cfg.iters))
      store(t + 1);
  }

  trace.iters_used = cfg.iters;
  trace.theta_bar = theta_sum / static_cast<double>(n_avg);
  trace.theta_last = theta;
  trace.x_last = x;

  // Monte-Carlo certificate: average deviation gain of the final x against
  // the observed profile at the averaged parameters.
  double cert = 0.0;
  Rng cert_rng = root.substream(0xCE);
  for (int k = 0; k < cfg.cert_samples; ++k) {
    Rng s_rng = cert_rng.substream(static_cast<std::uint64_t>(k));
    for (Index i = 0; i < game.n_players; ++i) {
      std::vector<FixedPolicy> pols = inv.observed;
      const Vec block = pc.block(x, i);
      pols[static_cast<std::size_t>(i)] = [&pc, block, i](const State& s) {
        return pc.act(block, s, i);
      };
      Rng dev_rng = s_rng.substream(2 * static_cast<std::uint64_t>(i) + 1);
      Rng eq_rng = s_rng.substream(2 * static_cast<std::uint64_t>(i) + 2);
      const History h_dev = simulate(game, pols, H, dev_rng);
      const History h_eq = simulate(game, inv.observed, H, eq_rng);
      cert += discounted_return(game, h_dev, trace.theta_bar)[i] -
              discounted_return(game, h_eq, trace.theta_bar)[i];
    }
  }
  trace.certificate = cert / static_cast<double>(cfg.cert_samples);
  trace.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return trace;
}

void write_history_csv(const MarkovGame& game, const History& h, const Vec& theta,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_history_csv: cannot open " + path);
  out << "t";
  if (game.finite())
    out << ",s";
  else
    for (Index k = 0; k < game.state_space.dim(); ++k) out << ",s" << k;
  for (Index k = 0; k < game.action_dim(); ++k) out << ",a" << k;
  for (Index i = 0; i < game.n_players; ++i) out << ",r" << i;
  out << '\n';
  out.precision(17);
  for (int t = 0; t < h.horizon(); ++t) {
    const State& s = h.states[static_cast<std::size_t>(t)];
    out << t;
    if (game.finite())
      out << ',' << s.idx;
    else
      for (Index k = 0; k < s.vec.size(); ++k) out << ',' << s.vec[k];
    const Vec a = h.actions.row(t).transpose();
    for (Index k = 0; k < a.size(); ++k) out << ',' << a[k];
    const Vec r = game.reward(s, a, theta);
    for (Index i = 0; i < r.size(); ++i) out << ',' << r[i];
    out << '\n';
  }
}

namespace {

using nlohmann::json;

json vec_json(const Vec& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Vec vec_from(const json& j) {
  const auto vals = j.get<std::vector<double>>();
  return Eigen::Map<const Vec>(vals.data(), static_cast<Index>(vals.size()));
}

}  // namespace

std::string FiniteMarkovGame::to_json() const {
  json j;
  j["schema"] = "igt.finite_markov_game.v1";
  j["n_states"] = n_states;
  j["n_actions"] = {n_actions1, n_actions2};
  j["discount"] = discount;
  j["init_probs"] = vec_json(init_probs);
  j["param_dim"] = param_dim;
  j["param_lo"] = vec_json(param_lo);
  j["param_hi"] = vec_json(param_hi);
  json feats = json::array();
  for (const auto& per_player : features) {
    json js = json::array();
    for (const auto& per_state : per_player) {
      json j1 = json::array();
      for (const auto& per_a1 : per_state) {
        json j2 = json::array();
        for (const Vec& phi : per_a1) j2.push_back(vec_json(phi));
        j1.push_back(j2);
      }
      js.push_back(j1);
    }
    feats.push_back(js);
  }
  j["features"] = feats;
  json trans = json::array();
  for (const auto& per_state : transition) {
    json j1 = json::array();
    for (const auto& per_a1 : per_state) {
      json j2 = json::array();
      for (const Vec& probs : per_a1) j2.push_back(vec_json(probs));
      j1.push_back(j2);
    }
    trans.push_back(j1);
  }
  j["transition"] = trans;
  return j.dump(2);
}

FiniteMarkovGame FiniteMarkovGame::from_json(const std::string& text) {
  const json j = json::parse(text);
  FiniteMarkovGame g;
  g.n_states = j.at("n_states").get<int>();
  g.n_actions1 = j.at("n_actions")[0].get<int>();
  g.n_actions2 = j.at("n_actions")[1].get<int>();
  g.discount = j.at("discount").get<double>();
  g.init_probs = vec_from(j.at("init_probs"));
  g.param_dim = j.at("param_dim").get<Index>();
  g.param_lo = vec_from(j.at("param_lo"));
  g.param_hi = vec_from(j.at("param_hi"));
  for (const auto& js : j.at("features")) {
    std::vector<std::vector<std::vector<Vec>>> per_player;
    for (const auto& j1 : js) {
      std::vector<std::vector<Vec>> per_state;
      for (const auto& j2 : j1) {
        std::vector<Vec> per_a1;
        for (const auto& jv : j2) per_a1.push_back(vec_from(jv));
        per_state.push_back(std::move(per_a1));
      }
      per_player.push_back(std::move(per_state));
    }
    g.features.push_back(std::move(per_player));
  }
  for (const auto& j1 : j.at("transition")) {
    std::vector<std::vector<Vec>> per_state;
    for (const auto& j2 : j1) {
      std::vector<Vec> per_a1;
      for (const auto& jv : j2) per_a1.push_back(vec_from(jv));
      per_state.push_back(std::move(per_a1));
    }
    g.transition.push_back(std::move(per_state));
  }
  return g;
}

MarkovGame to_markov_game(const FiniteMarkovGame& fmg) {
  MarkovGame g;
  g.n_states = fmg.n_states;
  g.action_spaces = {Space::simplex(fmg.n_actions1), Space::simplex(fmg.n_actions2)};
  finalize_action_offsets(g);
  g.param_space = Space::box(fmg.param_lo, fmg.param_hi);
  g.discount = fmg.discount;
  g.init_probs = fmg.init_probs;
  const int n1 = fmg.n_actions1, n2 = fmg.n_actions2;
  auto feats = fmg.features;
  auto trans = fmg.transition;

  g.reward = [feats, n1, n2](const State& s, const Vec& a, const Vec& theta) {
    Vec r = Vec::Zero(2);
    for (int p = 0; p < n1; ++p)
      for (int q = 0; q < n2; ++q) {
        const double w = a[p] * a[n1 + q];
        if (w == 0.0) continue;
        for (Index i = 0; i < 2; ++i)
          r[i] += w * theta.dot(feats[static_cast<std::size_t>(i)][s.idx][p][q]);
      }
    return r;
  };
  g.grad_reward_a = [feats, n1, n2](const State& s, const Vec& a, const Vec& theta,
                                    Index i) -> Vec {
    Vec grad = Vec::Zero(n1 + n2);
    for (int p = 0; p < n1; ++p)
      for (int q = 0; q < n2; ++q) {
        const double rpq = theta.dot(feats[static_cast<std::size_t>(i)][s.idx][p][q]);
        grad[p] += a[n1 + q] * rpq;
        grad[n1 + q] += a[p] * rpq;
      }
    return grad;
  };
  g.grad_reward_theta = [feats, n1, n2](const State& s, const Vec& a, const Vec& theta,
                                        Index i) -> Vec {
    Vec grad = Vec::Zero(theta.size());
    for (int p = 0; p < n1; ++p)
      for (int q = 0; q < n2; ++q) {
        const double w = a[p] * a[n1 + q];
        if (w != 0.0) grad += w * feats[static_cast<std::size_t>(i)][s.idx][p][q];
      }
    return grad;
  };
  g.transition_probs = [trans, n1, n2](const State& s, const Vec& a) {
    Vec probs = Vec::Zero(static_cast<Index>(trans[0][0][0].size()));
    for (int p = 0; p < n1; ++p)
      for (int q = 0; q < n2; ++q) {
        const double w = a[p] * a[n1 + q];
        if (w != 0.0) probs += w * trans[static_cast<std::size_t>(s.idx)][p][q];
      }
    return probs;
  };
  g.grad_transition_probs = [trans, n1, n2](const State& s, const Vec& a) {
    const Index ns = static_cast<Index>(trans[0][0][0].size());
    Mat grad = Mat::Zero(ns, n1 + n2);
    for (int p = 0; p < n1; ++p)
      for (int q = 0; q < n2; ++q) {
        grad.col(p) += a[n1 + q] * trans[static_cast<std::size_t>(s.idx)][p][q];
        grad.col(n1 + q) += a[p] * trans[static_cast<std::size_t>(s.idx)][p][q];
      }
    return grad;
  };
  return g;
}

}  // namespace igt
