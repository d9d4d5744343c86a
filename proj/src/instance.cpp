#include "igt/instance.hpp"

#include <stdexcept>

#include <nlohmann/json.hpp>

namespace igt {

using nlohmann::json;

const char* to_string(Family f) {
  switch (f) {
    case Family::FisherLinear: return "fisher_linear";
    case Family::FisherCobbDouglas: return "fisher_cobb_douglas";
    case Family::FisherLeontief: return "fisher_leontief";
    case Family::Cournot: return "cournot";
    case Family::Bertrand: return "bertrand";
    case Family::QuadraticToy: return "quadratic_toy";
    case Family::RandomMatrix: return "random_matrix";
  }
  return "?";
}

Family family_from_string(const std::string& name) {
  for (Family f : {Family::FisherLinear, Family::FisherCobbDouglas, Family::FisherLeontief,
                   Family::Cournot, Family::Bertrand, Family::QuadraticToy,
                   Family::RandomMatrix}) {
    if (name == to_string(f)) return f;
  }
  throw std::invalid_argument("unknown family: " + name);
}

const char* to_string(ParamMode m) {
  switch (m) {
    case ParamMode::BudgetsOnly: return "budgets_only";
    case ParamMode::TypesAndBudgets: return "types_and_budgets";
    case ParamMode::MarginalCost: return "marginal_cost";
    case ParamMode::Direct: return "direct";
  }
  return "?";
}

ParamMode param_mode_from_string(const std::string& name) {
  for (ParamMode m : {ParamMode::BudgetsOnly, ParamMode::TypesAndBudgets,
                      ParamMode::MarginalCost, ParamMode::Direct}) {
    if (name == to_string(m)) return m;
  }
  throw std::invalid_argument("unknown parameter mode: " + name);
}

namespace {

bool is_fisher(Family f) {
  return f == Family::FisherLinear || f == Family::FisherCobbDouglas ||
         f == Family::FisherLeontief;
}

UtilityClass fisher_class(Family f) {
  switch (f) {
    case Family::FisherLinear: return UtilityClass::Linear;
    case Family::FisherCobbDouglas: return UtilityClass::CobbDouglas;
    case Family::FisherLeontief: return UtilityClass::Leontief;
    default: throw std::logic_error("fisher_class: not a Fisher family");
  }
}

FisherParamMode fisher_mode(ParamMode mode) {
  if (mode == ParamMode::BudgetsOnly) return FisherParamMode::BudgetsOnly;
  if (mode == ParamMode::TypesAndBudgets) return FisherParamMode::TypesAndBudgets;
  throw std::invalid_argument("Fisher families require budgets_only or types_and_budgets");
}

}  // namespace

std::vector<ParamMode> GameInstance::supported_modes() const {
  if (is_fisher(family)) return {ParamMode::BudgetsOnly, ParamMode::TypesAndBudgets};
  if (family == Family::Cournot || family == Family::Bertrand)
    return {ParamMode::MarginalCost};
  return {ParamMode::Direct};
}

ParametricGame GameInstance::make_game(ParamMode mode) const {
  switch (family) {
    case Family::FisherLinear:
    case Family::FisherCobbDouglas:
    case Family::FisherLeontief:
      return eg_game(fisher_class(family), market.n_buyers(), market.n_goods(),
                     fisher_mode(mode), market.types);
    case Family::Cournot:
      if (mode != ParamMode::MarginalCost)
        throw std::invalid_argument("cournot supports marginal_cost mode only");
      return cournot_game(eq_strategy.size(), a, b);
    case Family::Bertrand:
      if (mode != ParamMode::MarginalCost)
        throw std::invalid_argument("bertrand supports marginal_cost mode only");
      return bertrand_game(eq_strategy.size(), cd, d);
    case Family::QuadraticToy:
      if (mode != ParamMode::Direct)
        throw std::invalid_argument("quadratic_toy supports direct mode only");
      return quadratic_toy(n_players_toy);
    case Family::RandomMatrix:
      if (mode != ParamMode::Direct)
        throw std::invalid_argument("random_matrix supports direct mode only");
      return random_matrix_game(matrix_k, Space::box(matrix_k * matrix_k, -2.0, 2.0));
  }
  throw std::logic_error("make_game: unknown family");
}

Vec GameInstance::true_params(ParamMode mode) const {
  if (is_fisher(family)) return pack_fisher_params(market, fisher_mode(mode));
  if (family == Family::Cournot || family == Family::Bertrand)
    return Vec::Constant(1, cost);
  return theta_direct;
}

StrategyProfile GameInstance::observed() const {
  ParametricGame g = make_game(supported_modes().front());
  if (is_fisher(family)) return g.wrap(pack_eg_profile(equilibrium.prices, equilibrium.alloc));
  if (family == Family::Cournot || family == Family::Bertrand) return g.wrap(eq_strategy);
  return g.wrap(x_direct);
}

double certify_instance(const GameInstance& inst) {
  const ParamMode mode = inst.supported_modes().front();
  const ParametricGame game = inst.make_game(mode);
  return exploitability(game, inst.true_params(mode), inst.observed().flat).value;
}

GameInstance sample_instance(Family family, Rng& rng) {
  GameInstance inst;
  inst.family = family;
  inst.seed = rng.seed();
  for (int attempt = 0; attempt < 64; ++attempt) {
    switch (family) {
      case Family::FisherLinear:
      case Family::FisherCobbDouglas:
      case Family::FisherLeontief: {
        inst.market = sample_fisher(fisher_class(family), 3, 2, rng);
        inst.equilibrium = solve_fisher_equilibrium(inst.market);
        break;
      }
      case Family::Cournot: {
        inst.a = rng.uniform(10.0, 100.0);
        inst.b = rng.uniform(-10.0, -0.01);
        inst.cost = rng.uniform(2.0, 20.0);
        const double q = cournot_nash_quantity(2, inst.cost, inst.a, inst.b);
        inst.eq_strategy = Vec::Constant(2, q);
        break;
      }
      case Family::Bertrand: {
        inst.cd = rng.uniform(10.0, 100.0);
        inst.d = rng.uniform(-10.0, -0.01);
        inst.cost = rng.uniform(2.0, 20.0);
        inst.eq_strategy = Vec::Constant(2, inst.cost);
        break;
      }
      case Family::QuadraticToy: {
        inst.n_players_toy = 2;
        inst.theta_direct = Vec::Constant(1, rng.uniform(-1.0, 1.0));
        inst.x_direct = Vec::Constant(2, inst.theta_direct[0]);
        break;
      }
      case Family::RandomMatrix: {
        inst.matrix_k = 3;
        Rng sub = rng.substream(17 + attempt);
        Vec x1 = sample_uniform(Space::simplex(inst.matrix_k), sub);
        Vec x2 = sample_uniform(Space::simplex(inst.matrix_k), sub);
        x1 = 0.8 * x1 + Vec::Constant(inst.matrix_k, 0.2 / inst.matrix_k);
        x2 = 0.8 * x2 + Vec::Constant(inst.matrix_k, 0.2 / inst.matrix_k);
        Mat A = matrix_with_interior_nash(x1, x2, sub.uniform(-0.5, 0.5), sub);
        // Rescale into the entry box; scaling preserves the NE structure.
        const double amax = A.cwiseAbs().maxCoeff();
        if (amax > 2.0) A *= 1.9 / amax;
        inst.theta_direct = Eigen::Map<Vec>(A.data(), inst.matrix_k * inst.matrix_k);
        Vec x(2 * inst.matrix_k);
        x << x1, x2;
        inst.x_direct = x;
        break;
      }
    }
    if (certify_instance(inst) <= 1e-6) return inst;
    ++inst.resamples;
  }
  throw std::runtime_error(std::string("sample_instance: certification kept failing for ") +
                           to_string(family));
}

namespace {

json vec_to_json(const Vec& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Vec vec_from_json(const json& j) {
  const auto vals = j.get<std::vector<double>>();
  return Eigen::Map<const Vec>(vals.data(), static_cast<Index>(vals.size()));
}

}  // namespace

std::string GameInstance::to_json() const {
  json j;
  j["family"] = to_string(family);
  j["seed"] = seed;
  j["resamples"] = resamples;
  json constants;
  if (is_fisher(family)) {
    constants["n_buyers"] = market.n_buyers();
    constants["n_goods"] = market.n_goods();
    json types = json::array();
    for (Index i = 0; i < market.n_buyers(); ++i)
      types.push_back(vec_to_json(market.types.row(i).transpose()));
    constants["types"] = types;
    j["theta_star"] = vec_to_json(pack_fisher_params(market, FisherParamMode::TypesAndBudgets));
    j["x_star"] = vec_to_json(pack_eg_profile(equilibrium.prices, equilibrium.alloc));
  } else if (family == Family::Cournot) {
    constants["a"] = a;
    constants["b"] = b;
    j["theta_star"] = vec_to_json(Vec::Constant(1, cost));
    j["x_star"] = vec_to_json(eq_strategy);
  } else if (family == Family::Bertrand) {
    constants["cd"] = cd;
    constants["d"] = d;
    j["theta_star"] = vec_to_json(Vec::Constant(1, cost));
    j["x_star"] = vec_to_json(eq_strategy);
  } else if (family == Family::QuadraticToy) {
    constants["n_players"] = n_players_toy;
    j["theta_star"] = vec_to_json(theta_direct);
    j["x_star"] = vec_to_json(x_direct);
  } else {
    constants["k"] = matrix_k;
    j["theta_star"] = vec_to_json(theta_direct);
    j["x_star"] = vec_to_json(x_direct);
  }
  j["constants"] = constants;
  return j.dump(2);
}

GameInstance GameInstance::from_json(const std::string& text) {
  const json j = json::parse(text);
  GameInstance inst;
  inst.family = family_from_string(j.at("family").get<std::string>());
  inst.seed = j.at("seed").get<std::uint64_t>();
  inst.resamples = j.value("resamples", 0);
  const json& constants = j.at("constants");
  const Vec theta_star = vec_from_json(j.at("theta_star"));
  const Vec x_star = vec_from_json(j.at("x_star"));
  if (is_fisher(inst.family)) {
    const Index n = constants.at("n_buyers").get<Index>();
    const Index m = constants.at("n_goods").get<Index>();
    inst.market.cls = fisher_class(inst.family);
    inst.market.types.resize(n, m);
    for (Index i = 0; i < n; ++i)
      inst.market.types.row(i) = theta_star.segment(i * m, m).transpose();
    inst.market.budgets = theta_star.tail(n);
    inst.equilibrium.prices = x_star.head(m);
    inst.equilibrium.alloc.resize(n, m);
    for (Index i = 0; i < n; ++i)
      inst.equilibrium.alloc.row(i) = x_star.segment(m + i * m, m).transpose();
  } else if (inst.family == Family::Cournot) {
    inst.a = constants.at("a").get<double>();
    inst.b = constants.at("b").get<double>();
    inst.cost = theta_star[0];
    inst.eq_strategy = x_star;
  } else if (inst.family == Family::Bertrand) {
    inst.cd = constants.at("cd").get<double>();
    inst.d = constants.at("d").get<double>();
    inst.cost = theta_star[0];
    inst.eq_strategy = x_star;
  } else if (inst.family == Family::QuadraticToy) {
    inst.n_players_toy = constants.at("n_players").get<Index>();
    inst.theta_direct = theta_star;
    inst.x_direct = x_star;
  } else {
    inst.matrix_k = constants.at("k").get<Index>();
    inst.theta_direct = theta_star;
    inst.x_direct = x_star;
  }
  return inst;
}

}  // namespace igt
