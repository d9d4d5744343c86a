#include "igt/stochastic_fisher.hpp"

#include <stdexcept>

#include "igt/fisher.hpp"

namespace igt {

double sfm_objective(const Vec& supplies, const Vec& budgets, const Vec& prices,
                     const Mat& alloc, const Vec& savings, const Mat& types) {
  double f = 0.0;
  for (Index j = 0; j < prices.size(); ++j)
    f += prices[j] * (supplies[j] - alloc.col(j).sum());
  for (Index i = 0; i < budgets.size(); ++i) {
    const double wealth = budgets[i] + savings[i];
    const double u = types.row(i).dot(alloc.row(i));
    f += wealth * floored_log(u / std::max(wealth, kUtilityFloor));
  }
  return f;
}

namespace {

struct SfmLayout {
  Index n, m;
  Index state_dim() const { return m + n; }
  Index price_off() const { return 0; }
  Index buyer_off(Index i) const { return m + i * (m + 1); }
  Index savings_off(Index i) const { return buyer_off(i) + m; }
  Index action_dim() const { return m + n * (m + 1); }
};

}  // namespace

MarkovGame stochastic_fisher_game(Index n_buyers, Index n_goods, const Vec& supplies,
                                  double discount, Rng& rng) {
  if (supplies.size() != n_goods)
    throw std::invalid_argument("stochastic_fisher_game: supplies size mismatch");
  if ((supplies.array() <= 0.0).any())
    throw std::invalid_argument("stochastic_fisher_game: supplies must be positive");

  const SfmLayout lay{n_buyers, n_goods};
  const double s_cap = 2.0;
  const double p_cap = 10.0;
  const double x_cap = 2.0 * supplies.maxCoeff() + 1.0;

  // Exogenous income ranges drawn per buyer.
  Vec income_lo(n_buyers), income_hi(n_buyers);
  for (Index i = 0; i < n_buyers; ++i) {
    income_lo[i] = rng.uniform(0.4, 0.8);
    income_hi[i] = income_lo[i] + rng.uniform(0.4, 0.8);
  }

  MarkovGame g;
  g.n_states = 0;
  Vec s_hi(lay.state_dim());
  s_hi.head(n_goods) = supplies;
  s_hi.tail(n_buyers).setConstant(s_cap + income_hi.maxCoeff() + 0.1);
  g.state_space = Space::box(Vec::Zero(lay.state_dim()), s_hi);
  g.action_spaces.push_back(Space::box(n_goods, 0.0, p_cap));
  for (Index i = 0; i < n_buyers; ++i) {
    Vec lo = Vec::Zero(n_goods + 1);
    Vec hi(n_goods + 1);
    hi.head(n_goods).setConstant(x_cap);
    hi[n_goods] = s_cap;
    g.action_spaces.push_back(Space::box(lo, hi));
  }
  finalize_action_offsets(g);
  g.param_space = Space::box(n_buyers * n_goods, 0.1, 10.0);
  g.discount = discount;

  auto unpack = [lay](const State& s, const Vec& a, const Vec& theta) {
    struct Parts {
      Vec q, b, p, savings;
      Mat alloc, types;
    } parts;
    parts.q = s.vec.head(lay.m);
    parts.b = s.vec.tail(lay.n);
    parts.p = a.segment(lay.price_off(), lay.m);
    parts.alloc.resize(lay.n, lay.m);
    parts.savings.resize(lay.n);
    for (Index i = 0; i < lay.n; ++i) {
      parts.alloc.row(i) = a.segment(lay.buyer_off(i), lay.m).transpose();
      parts.savings[i] = a[lay.savings_off(i)];
    }
    parts.types.resize(lay.n, lay.m);
    for (Index i = 0; i < lay.n; ++i)
      parts.types.row(i) = theta.segment(i * lay.m, lay.m).transpose();
    return parts;
  };

  g.reward = [lay, unpack](const State& s, const Vec& a, const Vec& theta) {
    const auto parts = unpack(s, a, theta);
    Vec r(lay.n + 1);
    const double f =
        sfm_objective(parts.q, parts.b, parts.p, parts.alloc, parts.savings, parts.types);
    r[0] = -f;
    for (Index i = 0; i < lay.n; ++i) {
      const double wealth = parts.b[i] + parts.savings[i];
      const double u = parts.types.row(i).dot(parts.alloc.row(i));
      r[i + 1] = wealth * floored_log(u / std::max(wealth, kUtilityFloor)) -
                 parts.p.dot(parts.alloc.row(i));
    }
    return r;
  };

  auto ratio_terms = [](double wealth, double u) {
    const double ratio = u / std::max(wealth, kUtilityFloor);
    const double value = floored_log(ratio);
    const double slope = floored_log_d(ratio);
    return std::make_pair(value, slope);
  };

  g.grad_reward_a = [lay, unpack, ratio_terms](const State& s, const Vec& a, const Vec& theta,
                                               Index i) -> Vec {
    const auto parts = unpack(s, a, theta);
    Vec grad = Vec::Zero(lay.action_dim());
    if (i == 0) {
      grad.segment(lay.price_off(), lay.m) =
          -(parts.q - parts.alloc.colwise().sum().transpose());
      for (Index b = 0; b < lay.n; ++b) {
        const double wealth = parts.b[b] + parts.savings[b];
        const double u = parts.types.row(b).dot(parts.alloc.row(b));
        const auto [value, slope] = ratio_terms(wealth, u);
        grad.segment(lay.buyer_off(b), lay.m) =
            parts.p - slope * parts.types.row(b).transpose();
        grad[lay.savings_off(b)] = -(value - slope * (u / std::max(wealth, kUtilityFloor)));
      }
      return grad;
    }
    const Index b = i - 1;
    const double wealth = parts.b[b] + parts.savings[b];
    const double u = parts.types.row(b).dot(parts.alloc.row(b));
    const auto [value, slope] = ratio_terms(wealth, u);
    grad.segment(lay.price_off(), lay.m) = -parts.alloc.row(b).transpose();
    grad.segment(lay.buyer_off(b), lay.m) =
        slope * parts.types.row(b).transpose() - parts.p;
    grad[lay.savings_off(b)] = value - slope * (u / std::max(wealth, kUtilityFloor));
    return grad;
  };

  g.grad_reward_state = [lay, unpack, ratio_terms](const State& s, const Vec& a,
                                                   const Vec& theta, Index i) -> Vec {
    const auto parts = unpack(s, a, theta);
    Vec grad = Vec::Zero(lay.state_dim());
    if (i == 0) {
      grad.head(lay.m) = -parts.p;
      for (Index b = 0; b < lay.n; ++b) {
        const double wealth = parts.b[b] + parts.savings[b];
        const double u = parts.types.row(b).dot(parts.alloc.row(b));
        const auto [value, slope] = ratio_terms(wealth, u);
        grad[lay.m + b] = -(value - slope * (u / std::max(wealth, kUtilityFloor)));
      }
      return grad;
    }
    const Index b = i - 1;
    const double wealth = parts.b[b] + parts.savings[b];
    const double u = parts.types.row(b).dot(parts.alloc.row(b));
    const auto [value, slope] = ratio_terms(wealth, u);
    grad[lay.m + b] = value - slope * (u / std::max(wealth, kUtilityFloor));
    return grad;
  };

  g.grad_reward_theta = [lay, unpack, ratio_terms](const State& s, const Vec& a,
                                                   const Vec& theta, Index i) -> Vec {
    const auto parts = unpack(s, a, theta);
    Vec grad = Vec::Zero(lay.n * lay.m);
    auto block = [&](Index b) {
      const double wealth = parts.b[b] + parts.savings[b];
      const double u = parts.types.row(b).dot(parts.alloc.row(b));
      const double slope = floored_log_d(u / std::max(wealth, kUtilityFloor));
      return Vec(slope * parts.alloc.row(b).transpose() / std::max(wealth, kUtilityFloor) *
                 wealth);
    };
    if (i == 0) {
      for (Index b = 0; b < lay.n; ++b) grad.segment(b * lay.m, lay.m) = -block(b);
      return grad;
    }
    grad.segment((i - 1) * lay.m, lay.m) = block(i - 1);
    return grad;
  };

  g.noise_dim = static_cast<int>(n_buyers);
  g.sample_noise = [n_buyers](Rng& r) {
    Vec u(n_buyers);
    for (Index i = 0; i < n_buyers; ++i) u[i] = r.uniform();
    return u;
  };
  g.step = [lay, income_lo, income_hi](const State& s, const Vec& a, const Vec& noise) {
    Vec next(lay.state_dim());
    next.head(lay.m) = s.vec.head(lay.m);
    for (Index i = 0; i < lay.n; ++i)
      next[lay.m + i] =
          a[lay.savings_off(i)] + income_lo[i] + (income_hi[i] - income_lo[i]) * noise[i];
    return next;
  };
  g.jac_step_state = [lay](const State&, const Vec&, const Vec&) {
    Mat jac = Mat::Zero(lay.state_dim(), lay.state_dim());
    jac.topLeftCorner(lay.m, lay.m).setIdentity();
    return jac;
  };
  g.jac_step_action = [lay](const State&, const Vec&, const Vec&) {
    Mat jac = Mat::Zero(lay.state_dim(), lay.action_dim());
    for (Index i = 0; i < lay.n; ++i) jac(lay.m + i, lay.savings_off(i)) = 1.0;
    return jac;
  };
  g.sample_init = [lay, supplies, income_lo, income_hi](Rng& r) {
    Vec s(lay.state_dim());
    s.head(lay.m) = supplies;
    for (Index i = 0; i < lay.n; ++i)
      s[lay.m + i] = r.uniform(income_lo[i], income_hi[i]);
    return s;
  };
  return g;
}

PolicyClass sfm_affine_policy_class(const MarkovGame& game, Index n_buyers, Index n_goods) {
  const SfmLayout lay{n_buyers, n_goods};
  PolicyClass pc;
  pc.param_offsets.assign(static_cast<std::size_t>(game.n_players) + 1, 0);
  std::vector<Space> blocks;
  for (Index i = 0; i < game.n_players; ++i) {
    const Index a_dim = game.action_block_dim(i);
    // Per action coordinate: weights on the budget part of the state plus a
    // bias, all boxed; actions are clamped into their spaces by act().
    blocks.push_back(Space::box(a_dim * (n_buyers + 1), -3.0, 3.0));
    pc.param_offsets[i + 1] = pc.param_offsets[i] + blocks.back().dim();
  }
  pc.param_space = Space::product(blocks);

  const std::vector<Space> action_spaces = game.action_spaces;
  auto raw_action = [lay](const Vec& x_i, const Vec& budgets, Index a_dim) {
    Vec raw(a_dim);
    for (Index k = 0; k < a_dim; ++k) {
      const Index off = k * (lay.n + 1);
      raw[k] = x_i[off + lay.n] + x_i.segment(off, lay.n).dot(budgets);
    }
    return raw;
  };
  pc.act = [lay, action_spaces, raw_action](const Vec& x_i, const State& s, Index i) {
    const Vec budgets = s.vec.tail(lay.n);
    const Space& space = action_spaces[i];
    return Vec(raw_action(x_i, budgets, space.dim())
                   .cwiseMax(space.lower())
                   .cwiseMin(space.upper()));
  };
  pc.jac_params = [lay, action_spaces, raw_action](const Vec& x_i, const State& s, Index i) {
    const Vec budgets = s.vec.tail(lay.n);
    const Space& space = action_spaces[i];
    const Index a_dim = space.dim();
    const Vec raw = raw_action(x_i, budgets, a_dim);
    Mat jac = Mat::Zero(a_dim, x_i.size());
    for (Index k = 0; k < a_dim; ++k) {
      if (raw[k] <= space.lower()[k] || raw[k] >= space.upper()[k]) continue;  // clamped
      const Index off = k * (lay.n + 1);
      jac.block(k, off, 1, lay.n) = budgets.transpose();
      jac(k, off + lay.n) = 1.0;
    }
    return jac;
  };
  pc.jac_state = [lay, action_spaces, raw_action](const Vec& x_i, const State& s, Index i) {
    const Vec budgets = s.vec.tail(lay.n);
    const Space& space = action_spaces[i];
    const Index a_dim = space.dim();
    const Vec raw = raw_action(x_i, budgets, a_dim);
    Mat jac = Mat::Zero(a_dim, lay.state_dim());
    for (Index k = 0; k < a_dim; ++k) {
      if (raw[k] <= space.lower()[k] || raw[k] >= space.upper()[k]) continue;
      const Index off = k * (lay.n + 1);
      jac.block(k, lay.m, 1, lay.n) = x_i.segment(off, lay.n).transpose();
    }
    return jac;
  };
  return pc;
}

}  // namespace igt
