#pragma once

#include "igt/games.hpp"
#include "igt/types.hpp"

namespace igt {

/// Per-firm Cournot profits q_i * (P(Q) - c) with inverse demand
/// P(Q) = a + b*Q, b < 0.
Vec cournot_payoffs(const Vec& q, double c, double a, double b);

/// Symmetric interior Nash quantity (a - c) / (|b| (n + 1)), clamped at 0.
double cournot_nash_quantity(Index n_firms, double c, double a, double b);

/// Cournot duopoly-or-more as a parametric game with theta = marginal cost
/// in [2, 20]; best responses are closed form.
ParametricGame cournot_game(Index n_firms, double a, double b);

/// Bertrand demand split: the strictly lowest price takes D(p_min), ties
/// share it, everyone else sells nothing. D(p) = max(0, cd + d*p).
Vec bertrand_demands(const Vec& p, double cd, double d);
Vec bertrand_payoffs(const Vec& p, double c, double cd, double d);

/// Bertrand competition with theta = marginal cost; payoffs are
/// discontinuous so the inner max uses a price grid on [0, cd/|d|].
ParametricGame bertrand_game(Index n_firms, double cd, double d);

/// Number of grid points used for Bertrand best responses.
inline constexpr int kBertrandGridPoints = 2048;

}  // namespace igt
