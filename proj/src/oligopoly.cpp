#include "igt/oligopoly.hpp"

#include <cmath>
#include <stdexcept>

namespace igt {

Vec cournot_payoffs(const Vec& q, double c, double a, double b) {
  if (b >= 0.0) throw std::invalid_argument("cournot_payoffs: demand slope b must be negative");
  const double price = a + b * q.sum();
  return q * (price - c);
}

double cournot_nash_quantity(Index n_firms, double c, double a, double b) {
  return std::max(0.0, (a - c) / (-b * static_cast<double>(n_firms + 1)));
}

ParametricGame cournot_game(Index n_firms, double a, double b) {
  if (b >= 0.0) throw std::invalid_argument("cournot_game: b must be negative");
  ParametricGame g;
  const double c_min = 2.0;
  const double q_cap = std::max(1.0, 1.05 * (a - c_min) / (-2.0 * b));
  for (Index i = 0; i < n_firms; ++i) g.strategy_spaces.push_back(Space::box(1, 0.0, q_cap));
  g.param_space = Space::box(1, 2.0, 20.0);
  finalize_offsets(g);

  g.payoff = [a, b](const Vec& q, const Vec& theta) {
    return cournot_payoffs(q, theta[0], a, b);
  };
  g.grad_payoff_x = [a, b](const Vec& q, const Vec& theta, Index i) {
    return Vec::Constant(1, a + b * q.sum() - theta[0] + b * q[i]);
  };
  g.grad_payoff_theta = [](const Vec& q, const Vec&, Index i) {
    return Vec::Constant(1, -q[i]);
  };
  g.best_response = [a, b, q_cap](const Vec& q, const Vec& theta, Index i) {
    const double rivals = q.sum() - q[i];
    const double br = (a - theta[0] + b * rivals) / (-2.0 * b);
    return Vec::Constant(1, std::clamp(br, 0.0, q_cap));
  };
  g.br_method = BestResponseMethod::ClosedForm;
  return g;
}

Vec bertrand_demands(const Vec& p, double cd, double d) {
  if (d >= 0.0) throw std::invalid_argument("bertrand_demands: demand slope d must be negative");
  const Index n = p.size();
  const double p_min = p.minCoeff();
  Index n_min = 0;
  for (Index i = 0; i < n; ++i)
    if (p[i] == p_min) ++n_min;
  const double demand = std::max(0.0, cd + d * p_min);
  Vec out = Vec::Zero(n);
  for (Index i = 0; i < n; ++i)
    if (p[i] == p_min) out[i] = demand / static_cast<double>(n_min);
  return out;
}

Vec bertrand_payoffs(const Vec& p, double c, double cd, double d) {
  const Vec demand = bertrand_demands(p, cd, d);
  return demand.cwiseProduct((p.array() - c).matrix());
}

ParametricGame bertrand_game(Index n_firms, double cd, double d) {
  if (d >= 0.0) throw std::invalid_argument("bertrand_game: d must be negative");
  ParametricGame g;
  // Price box covers the zero-demand (choke) price and the whole cost range
  // so pricing at marginal cost is always feasible.
  const double p_cap = std::max(cd / (-d), 21.0);
  for (Index i = 0; i < n_firms; ++i) g.strategy_spaces.push_back(Space::box(1, 0.0, p_cap));
  g.param_space = Space::box(1, 2.0, 20.0);
  finalize_offsets(g);

  g.payoff = [cd, d](const Vec& p, const Vec& theta) {
    return bertrand_payoffs(p, theta[0], cd, d);
  };
  // Branch derivative w.r.t. own price: lowest-price (or tie-share) branch
  // differentiates D_i(p)*(p_i - c) holding the branch fixed; losers get 0.
  g.grad_payoff_x = [cd, d](const Vec& p, const Vec& theta, Index i) -> Vec {
    const double p_min = p.minCoeff();
    if (p[i] > p_min) return Vec::Zero(1);
    const double raw = cd + d * p_min;
    if (raw <= 0.0) return Vec::Zero(1);
    Index n_min = 0;
    for (Index k = 0; k < p.size(); ++k)
      if (p[k] == p_min) ++n_min;
    return Vec::Constant(1, (d * (p[i] - theta[0]) + raw) / static_cast<double>(n_min));
  };
  g.grad_payoff_theta = [cd, d](const Vec& p, const Vec&, Index i) {
    return Vec::Constant(1, -bertrand_demands(p, cd, d)[i]);
  };
  g.br_method = BestResponseMethod::Grid;
  g.grid_hi = cd / (-d);
  return g;
}

}  // namespace igt
