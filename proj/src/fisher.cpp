#include "igt/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace igt {

const char* to_string(UtilityClass c) {
  switch (c) {
    case UtilityClass::Linear: return "linear";
    case UtilityClass::CobbDouglas: return "cobb_douglas";
    case UtilityClass::Leontief: return "leontief";
  }
  return "?";
}

namespace {

Index leontief_argmin(const Vec& x, const Vec& theta) {
  Index best = 0;
  double val = x[0] / theta[0];
  for (Index j = 1; j < x.size(); ++j) {
    const double r = x[j] / theta[j];
    if (r < val) {
      val = r;
      best = j;
    }
  }
  return best;
}

}  // namespace

double buyer_utility(UtilityClass cls, const Vec& x, const Vec& theta) {
  switch (cls) {
    case UtilityClass::Linear:
      return theta.dot(x);
    case UtilityClass::CobbDouglas: {
      double u = 1.0;
      for (Index j = 0; j < x.size(); ++j) u *= std::pow(std::max(x[j], 0.0), theta[j]);
      return u;
    }
    case UtilityClass::Leontief:
      return x[leontief_argmin(x, theta)] / theta[leontief_argmin(x, theta)];
  }
  return 0.0;
}

double log_utility(UtilityClass cls, const Vec& x, const Vec& theta) {
  return floored_log(buyer_utility(cls, x, theta));
}

Vec grad_log_utility_x(UtilityClass cls, const Vec& x, const Vec& theta) {
  switch (cls) {
    case UtilityClass::Linear:
      return theta / std::max(theta.dot(x), kUtilityFloor);
    case UtilityClass::CobbDouglas: {
      // Coordinatewise log: exact gradient of sum_j theta_j log x_j away
      // from zero, restoring at floored coordinates.
      Vec g(x.size());
      for (Index j = 0; j < x.size(); ++j) g[j] = theta[j] / std::max(x[j], kUtilityFloor);
      return g;
    }
    case UtilityClass::Leontief: {
      Vec g = Vec::Zero(x.size());
      const Index j = leontief_argmin(x, theta);
      g[j] = 1.0 / (theta[j] * std::max(x[j] / theta[j], kUtilityFloor));
      return g;
    }
  }
  return Vec::Zero(x.size());
}

Vec grad_log_utility_theta(UtilityClass cls, const Vec& x, const Vec& theta) {
  switch (cls) {
    case UtilityClass::Linear:
      return x / std::max(theta.dot(x), kUtilityFloor);
    case UtilityClass::CobbDouglas: {
      Vec g(theta.size());
      for (Index j = 0; j < theta.size(); ++j) g[j] = std::log(std::max(x[j], kUtilityFloor));
      return g;
    }
    case UtilityClass::Leontief: {
      Vec g = Vec::Zero(theta.size());
      const Index j = leontief_argmin(x, theta);
      g[j] = -1.0 / theta[j];  // d/dtheta_j log(x_j/theta_j) at the active coordinate
      return g;
    }
  }
  return Vec::Zero(theta.size());
}

double eg_objective(UtilityClass cls, const Vec& p, const Mat& X, const Mat& types,
                    const Vec& budgets) {
  double f = 0.0;
  for (Index i = 0; i < X.rows(); ++i)
    f += budgets[i] * log_utility(cls, X.row(i).transpose(), types.row(i).transpose());
  for (Index j = 0; j < p.size(); ++j) f += p[j] * (1.0 - X.col(j).sum());
  return f;
}

Vec buyer_best_response(UtilityClass cls, const Vec& theta_i, double b_i, const Vec& p) {
  const Index m = p.size();
  if (b_i <= 0.0) throw std::invalid_argument("buyer_best_response: budget must be positive");
  switch (cls) {
    case UtilityClass::Linear: {
      for (Index j = 0; j < m; ++j)
        if (p[j] <= 0.0 && theta_i[j] > 0.0)
          throw std::runtime_error("buyer_best_response: free good with positive value, "
                                   "demand unbounded");
      double best = -1.0;
      for (Index j = 0; j < m; ++j)
        if (p[j] > 0.0) best = std::max(best, theta_i[j] / p[j]);
      std::vector<Index> ties;
      for (Index j = 0; j < m; ++j)
        if (p[j] > 0.0 && theta_i[j] / p[j] == best) ties.push_back(j);
      Vec x = Vec::Zero(m);
      for (Index j : ties) x[j] = b_i / (static_cast<double>(ties.size()) * p[j]);
      return x;
    }
    case UtilityClass::CobbDouglas: {
      const double total = theta_i.sum();
      Vec x(m);
      for (Index j = 0; j < m; ++j) x[j] = (theta_i[j] / total) * b_i / p[j];
      return x;
    }
    case UtilityClass::Leontief: {
      const double denom = p.dot(theta_i);
      return theta_i * (b_i / denom);
    }
  }
  throw std::logic_error("buyer_best_response: unknown class");
}

double eg_price_cap(Index n_buyers) { return 10.0 * static_cast<double>(n_buyers) * 1.5; }
double eg_alloc_cap() { return 100.0; }

namespace {

// argmax over [0, cap]^m of b*log(max(u(x), floor)) - p.x, exact per class.
Vec eg_buyer_argmax(UtilityClass cls, const Vec& theta, double b, const Vec& p, double cap) {
  const Index m = p.size();
  switch (cls) {
    case UtilityClass::CobbDouglas: {
      Vec x(m);
      for (Index j = 0; j < m; ++j) {
        if (p[j] <= 0.0) {
          x[j] = cap;
        } else {
          x[j] = std::clamp(b * theta[j] / p[j], 0.0, cap);
        }
      }
      return x;
    }
    case UtilityClass::Leontief: {
      double t = std::numeric_limits<double>::infinity();
      const double denom = p.dot(theta);
      if (denom > 0.0) t = b / denom;
      for (Index j = 0; j < m; ++j) t = std::min(t, cap / theta[j]);
      return theta * t;
    }
    case UtilityClass::Linear: {
      // Greedy waterfill by bang-per-buck; marginal value of good j is
      // b*theta_j/u - p_j, monotone decreasing in u.
      std::vector<Index> order(static_cast<std::size_t>(m));
      std::iota(order.begin(), order.end(), Index{0});
      std::sort(order.begin(), order.end(), [&](Index a, Index c) {
        const double ra = p[a] > 0 ? theta[a] / p[a] : std::numeric_limits<double>::infinity();
        const double rc = p[c] > 0 ? theta[c] / p[c] : std::numeric_limits<double>::infinity();
        if (ra != rc) return ra > rc;
        return a < c;
      });
      Vec x = Vec::Zero(m);
      double u = 0.0;
      for (Index j : order) {
        if (theta[j] <= 0.0) break;
        if (p[j] <= 0.0) {
          x[j] = cap;
          u += theta[j] * cap;
          continue;
        }
        const double u_target = b * theta[j] / p[j];
        if (u >= u_target) break;
        const double step = std::min((u_target - u) / theta[j], cap);
        x[j] = step;
        u += theta[j] * step;
        if (step >= cap) continue;
        break;
      }
      return x;
    }
  }
  throw std::logic_error("eg_buyer_argmax: unknown class");
}

}  // namespace

Vec pack_eg_profile(const Vec& prices, const Mat& alloc) {
  const Index m = prices.size();
  Vec x(m + alloc.rows() * m);
  x.head(m) = prices;
  for (Index i = 0; i < alloc.rows(); ++i) x.segment(m + i * m, m) = alloc.row(i).transpose();
  return x;
}

Vec pack_fisher_params(const FisherMarket& market, FisherParamMode mode) {
  const Index n = market.n_buyers(), m = market.n_goods();
  if (mode == FisherParamMode::BudgetsOnly) return market.budgets;
  Vec theta(n * m + n);
  for (Index i = 0; i < n; ++i) theta.segment(i * m, m) = market.types.row(i).transpose();
  theta.tail(n) = market.budgets;
  return theta;
}

void unpack_fisher_params(const Vec& theta, FisherParamMode mode, UtilityClass,
                          Index n_buyers, Index n_goods, Mat& types_out, Vec& budgets_out,
                          const Mat& fixed_types) {
  if (mode == FisherParamMode::BudgetsOnly) {
    types_out = fixed_types;
    budgets_out = theta;
    return;
  }
  types_out.resize(n_buyers, n_goods);
  for (Index i = 0; i < n_buyers; ++i)
    types_out.row(i) = theta.segment(i * n_goods, n_goods).transpose();
  budgets_out = theta.tail(n_buyers);
}

ParametricGame eg_game(UtilityClass cls, Index n_buyers, Index n_goods, FisherParamMode mode,
                       const Mat& fixed_types) {
  if (mode == FisherParamMode::BudgetsOnly &&
      (fixed_types.rows() != n_buyers || fixed_types.cols() != n_goods))
    throw std::invalid_argument("eg_game: BudgetsOnly requires fixed types of shape n x m");

  ParametricGame g;
  const double p_cap = eg_price_cap(n_buyers);
  const double x_cap = eg_alloc_cap();
  g.strategy_spaces.push_back(Space::box(n_goods, 0.0, p_cap));
  for (Index i = 0; i < n_buyers; ++i)
    g.strategy_spaces.push_back(Space::box(n_goods, 0.0, x_cap));
  finalize_offsets(g);

  const Space budget_box = Space::box(n_buyers, 0.1, 10.0);
  if (mode == FisherParamMode::BudgetsOnly) {
    g.param_space = budget_box;
  } else {
    std::vector<Space> factors;
    for (Index i = 0; i < n_buyers; ++i) {
      factors.push_back(cls == UtilityClass::CobbDouglas ? Space::simplex(n_goods)
                                                         : Space::box(n_goods, 0.1, 10.0));
    }
    factors.push_back(budget_box);
    g.param_space = Space::product(std::move(factors));
  }

  const Index m = n_goods, n = n_buyers;
  auto split = [mode, cls, n, m, fixed_types](const Vec& theta, Mat& types, Vec& budgets) {
    unpack_fisher_params(theta, mode, cls, n, m, types, budgets, fixed_types);
  };

  g.payoff = [cls, n, m, split](const Vec& x, const Vec& theta) {
    Mat types;
    Vec budgets;
    split(theta, types, budgets);
    const Vec p = x.head(m);
    Vec u(n + 1);
    double log_terms = 0.0, clearing = 0.0;
    for (Index j = 0; j < m; ++j) {
      double col = 0.0;
      for (Index i = 0; i < n; ++i) col += x[m + i * m + j];
      clearing += p[j] * (1.0 - col);
    }
    for (Index i = 0; i < n; ++i) {
      const Vec xi = x.segment(m + i * m, m);
      const double lu = log_utility(cls, xi, types.row(i).transpose());
      log_terms += budgets[i] * lu;
      u[i + 1] = budgets[i] * lu - p.dot(xi);
    }
    u[0] = -(log_terms + clearing);
    return u;
  };

  g.grad_payoff_x = [cls, n, m, split](const Vec& x, const Vec& theta, Index i) -> Vec {
    Mat types;
    Vec budgets;
    split(theta, types, budgets);
    const Vec p = x.head(m);
    if (i == 0) {
      Vec g0(m);
      for (Index j = 0; j < m; ++j) {
        double col = 0.0;
        for (Index b = 0; b < n; ++b) col += x[m + b * m + j];
        g0[j] = -(1.0 - col);
      }
      return g0;
    }
    const Index b = i - 1;
    const Vec xi = x.segment(m + b * m, m);
    return budgets[b] * grad_log_utility_x(cls, xi, types.row(b).transpose()) - p;
  };

  g.grad_payoff_theta = [cls, mode, n, m, split](const Vec& x, const Vec& theta,
                                                 Index i) -> Vec {
    Mat types;
    Vec budgets;
    split(theta, types, budgets);
    const Vec p = x.head(m);
    Vec grad = Vec::Zero(theta.size());
    const Index budget_off = (mode == FisherParamMode::BudgetsOnly) ? 0 : n * m;
    if (i == 0) {
      // Seller payoff is -(sum_i b_i log u_i + clearing); clearing has no
      // theta dependence.
      for (Index b = 0; b < n; ++b) {
        const Vec xb = x.segment(m + b * m, m);
        const double lu = log_utility(cls, xb, types.row(b).transpose());
        grad[budget_off + b] = -lu;
        if (mode == FisherParamMode::TypesAndBudgets) {
          grad.segment(b * m, m) =
              -budgets[b] * grad_log_utility_theta(cls, xb, types.row(b).transpose());
        }
      }
      return grad;
    }
    const Index b = i - 1;
    const Vec xb = x.segment(m + b * m, m);
    grad[budget_off + b] = log_utility(cls, xb, types.row(b).transpose());
    if (mode == FisherParamMode::TypesAndBudgets) {
      grad.segment(b * m, m) =
          budgets[b] * grad_log_utility_theta(cls, xb, types.row(b).transpose());
    }
    return grad;
  };

  g.best_response = [cls, n, m, split, p_cap, x_cap](const Vec& x, const Vec& theta,
                                                     Index i) -> Vec {
    Mat types;
    Vec budgets;
    split(theta, types, budgets);
    if (i == 0) {
      Vec p_dev(m);
      for (Index j = 0; j < m; ++j) {
        double col = 0.0;
        for (Index b = 0; b < n; ++b) col += x[m + b * m + j];
        p_dev[j] = (1.0 - col) < 0.0 ? p_cap : 0.0;
      }
      return p_dev;
    }
    const Index b = i - 1;
    return eg_buyer_argmax(cls, types.row(b).transpose(), budgets[b], x.head(m), x_cap);
  };
  g.br_method = BestResponseMethod::ClosedForm;
  g.smooth_payoffs = cls != UtilityClass::Leontief;
  return g;
}

ParametricGame eg_game_cd_scaled(Index n_buyers, Index n_goods) {
  ParametricGame g;
  const double p_cap = eg_price_cap(n_buyers);
  const double x_cap = eg_alloc_cap();
  g.strategy_spaces.push_back(Space::box(n_goods, 0.0, p_cap));
  for (Index i = 0; i < n_buyers; ++i)
    g.strategy_spaces.push_back(Space::box(n_goods, 0.0, x_cap));
  finalize_offsets(g);
  g.param_space = Space::box(n_buyers * n_goods, 0.0, 10.0);

  const Index n = n_buyers, m = n_goods;
  auto coord_logs = [m](const Vec& x, Index i) {
    Vec l(m);
    for (Index j = 0; j < m; ++j)
      l[j] = std::log(std::max(x[m + i * m + j], kUtilityFloor));
    return l;
  };
  g.payoff = [n, m, coord_logs](const Vec& x, const Vec& kappa) {
    const Vec p = x.head(m);
    Vec u(n + 1);
    double log_terms = 0.0, clearing = 0.0;
    for (Index j = 0; j < m; ++j) {
      double col = 0.0;
      for (Index i = 0; i < n; ++i) col += x[m + i * m + j];
      clearing += p[j] * (1.0 - col);
    }
    for (Index i = 0; i < n; ++i) {
      const double lu = kappa.segment(i * m, m).dot(coord_logs(x, i));
      log_terms += lu;
      u[i + 1] = lu - p.dot(x.segment(m + i * m, m));
    }
    u[0] = -(log_terms + clearing);
    return u;
  };
  g.grad_payoff_x = [n, m](const Vec& x, const Vec& kappa, Index i) -> Vec {
    const Vec p = x.head(m);
    if (i == 0) {
      Vec g0(m);
      for (Index j = 0; j < m; ++j) {
        double col = 0.0;
        for (Index b = 0; b < n; ++b) col += x[m + b * m + j];
        g0[j] = -(1.0 - col);
      }
      return g0;
    }
    const Index b = i - 1;
    Vec gx(m);
    for (Index j = 0; j < m; ++j)
      gx[j] = kappa[b * m + j] / std::max(x[m + b * m + j], kUtilityFloor) - p[j];
    return gx;
  };
  g.grad_payoff_theta = [n, m, coord_logs](const Vec& x, const Vec&, Index i) -> Vec {
    Vec grad = Vec::Zero(n * m);
    if (i == 0) {
      for (Index b = 0; b < n; ++b) grad.segment(b * m, m) = -coord_logs(x, b);
      return grad;
    }
    grad.segment((i - 1) * m, m) = coord_logs(x, i - 1);
    return grad;
  };
  g.best_response = [n, m, p_cap, x_cap](const Vec& x, const Vec& kappa, Index i) -> Vec {
    if (i == 0) {
      Vec p_dev(m);
      for (Index j = 0; j < m; ++j) {
        double col = 0.0;
        for (Index b = 0; b < n; ++b) col += x[m + b * m + j];
        p_dev[j] = (1.0 - col) < 0.0 ? p_cap : 0.0;
      }
      return p_dev;
    }
    // Separable: argmax_x kappa_j log x_j - p_j x_j = kappa_j / p_j.
    const Vec p = x.head(m);
    Vec out(m);
    for (Index j = 0; j < m; ++j)
      out[j] = p[j] <= 0.0 ? x_cap : std::clamp(kappa[(i - 1) * m + j] / p[j], 0.0, x_cap);
    return out;
  };
  g.br_method = BestResponseMethod::ClosedForm;
  return g;
}

Vec pack_cd_scaled(const FisherMarket& market) {
  const Index n = market.n_buyers(), m = market.n_goods();
  Vec kappa(n * m);
  for (Index i = 0; i < n; ++i)
    kappa.segment(i * m, m) = market.budgets[i] * market.types.row(i).transpose();
  return kappa;
}

Vec scaled_types_to_packed(const Vec& kappa, Index n_buyers, Index n_goods) {
  Vec packed(n_buyers * n_goods + n_buyers);
  for (Index i = 0; i < n_buyers; ++i) {
    const Vec k_i = kappa.segment(i * n_goods, n_goods);
    const double b_i = std::max(k_i.sum(), 1e-12);
    packed.segment(i * n_goods, n_goods) = k_i / b_i;
    packed[n_buyers * n_goods + i] = b_i;
  }
  return packed;
}

namespace {

FisherEquilibrium cobb_douglas_equilibrium(const FisherMarket& mkt) {
  const Index n = mkt.n_buyers(), m = mkt.n_goods();
  FisherEquilibrium eq;
  eq.prices = Vec::Zero(m);
  for (Index j = 0; j < m; ++j)
    for (Index i = 0; i < n; ++i) eq.prices[j] += mkt.budgets[i] * mkt.types(i, j);
  eq.alloc.resize(n, m);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < m; ++j)
      eq.alloc(i, j) = mkt.types(i, j) * mkt.budgets[i] / eq.prices[j];
  return eq;
}

FisherEquilibrium linear_proportional_response(const FisherMarket& mkt, double tol,
                                               int max_iters) {
  const Index n = mkt.n_buyers(), m = mkt.n_goods();
  Mat bids = Mat::Zero(n, m);
  for (Index i = 0; i < n; ++i) bids.row(i).setConstant(mkt.budgets[i] / static_cast<double>(m));
  Vec p(m);
  for (int it = 0; it < max_iters; ++it) {
    for (Index j = 0; j < m; ++j) p[j] = bids.col(j).sum();
    Mat next(n, m);
    double delta = 0.0;
    for (Index i = 0; i < n; ++i) {
      double u = 0.0;
      for (Index j = 0; j < m; ++j) u += mkt.types(i, j) * bids(i, j) / p[j];
      for (Index j = 0; j < m; ++j) {
        next(i, j) = mkt.budgets[i] * mkt.types(i, j) * (bids(i, j) / p[j]) / u;
        delta = std::max(delta, std::abs(next(i, j) - bids(i, j)));
      }
    }
    bids = next;
    if (delta < tol) break;
  }
  FisherEquilibrium eq;
  eq.prices = Vec(m);
  for (Index j = 0; j < m; ++j) eq.prices[j] = bids.col(j).sum();
  eq.alloc.resize(n, m);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < m; ++j) eq.alloc(i, j) = bids(i, j) / eq.prices[j];
  return eq;
}

// Gradient descent with backtracking on the smooth convex EG dual
// g(p) = sum_j p_j - sum_i b_i log(p . theta_i); grad g = 1 - demand.
FisherEquilibrium leontief_tatonnement(const FisherMarket& mkt, double tol, int max_iters) {
  const Index n = mkt.n_buyers(), m = mkt.n_goods();
  auto dual = [&](const Vec& p) {
    double g = p.sum();
    for (Index i = 0; i < n; ++i)
      g -= mkt.budgets[i] * std::log(p.dot(mkt.types.row(i).transpose()));
    return g;
  };
  auto excess = [&](const Vec& p) {
    Vec z = Vec::Constant(m, -1.0);
    for (Index i = 0; i < n; ++i) {
      const double denom = p.dot(mkt.types.row(i).transpose());
      z += mkt.budgets[i] / denom * mkt.types.row(i).transpose();
    }
    return z;  // demand - supply = -grad(dual)
  };
  Vec p = Vec::Constant(m, mkt.budgets.sum() / static_cast<double>(m));
  double step = 1.0;
  for (int it = 0; it < max_iters; ++it) {
    const Vec z = excess(p);
    if (z.cwiseAbs().maxCoeff() < tol) break;
    const double g0 = dual(p);
    Vec cand = (p + step * z).cwiseMax(1e-12);
    int backtracks = 0;
    while (dual(cand) > g0 - 0.25 * step * z.squaredNorm() && backtracks < 60) {
      step *= 0.5;
      cand = (p + step * z).cwiseMax(1e-12);
      ++backtracks;
    }
    p = cand;
    step = std::min(step * 2.0, 1e6);
  }
  FisherEquilibrium eq;
  eq.prices = p;
  eq.alloc.resize(n, m);
  for (Index i = 0; i < n; ++i)
    eq.alloc.row(i) =
        buyer_best_response(UtilityClass::Leontief, mkt.types.row(i).transpose(),
                            mkt.budgets[i], p)
            .transpose();
  return eq;
}

}  // namespace

FisherEquilibrium solve_fisher_equilibrium(const FisherMarket& market, double tol,
                                           int max_iters) {
  switch (market.cls) {
    case UtilityClass::CobbDouglas:
      return cobb_douglas_equilibrium(market);
    case UtilityClass::Linear:
      return linear_proportional_response(market, tol, max_iters);
    case UtilityClass::Leontief:
      return leontief_tatonnement(market, tol, max_iters);
  }
  throw std::logic_error("solve_fisher_equilibrium: unknown class");
}

FisherMarket sample_fisher(UtilityClass cls, Index n_buyers, Index n_goods, Rng& rng) {
  FisherMarket mkt;
  mkt.cls = cls;
  mkt.types.resize(n_buyers, n_goods);
  mkt.budgets.resize(n_buyers);
  for (Index i = 0; i < n_buyers; ++i) {
    mkt.budgets[i] = std::max(rng.uniform(0.0, 10.0), 0.1);
    for (Index j = 0; j < n_goods; ++j) mkt.types(i, j) = std::max(rng.uniform(0.0, 10.0), 0.1);
  }
  if (cls == UtilityClass::CobbDouglas) {
    for (Index i = 0; i < n_buyers; ++i) mkt.types.row(i) /= mkt.types.row(i).sum();
  }
  return mkt;
}

}  // namespace igt
