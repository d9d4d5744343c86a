#include "igt/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

namespace igt {

using nlohmann::json;

bool recovery_check(const Vec& theta_hat, const Vec& theta_star, double eps) {
  if (theta_hat.size() != theta_star.size())
    throw std::invalid_argument("recovery_check: dimension mismatch");
  if ((theta_star.array() == 0.0).any())
    throw std::invalid_argument("recovery_check: theta_star has a zero component");
  return (theta_hat - theta_star).cwiseQuotient(theta_star).norm() <= eps;
}

GdaConfig benchmark_solver_defaults(Family family, ParamMode mode) {
  GdaConfig cfg;
  cfg.average = false;  // report the final iterate; theta_bar stays in the trace
  cfg.stop_rel_tol = 0.0;
  switch (family) {
    case Family::Cournot:
      cfg.iters = 10000;
      cfg.eta_theta = cfg.eta_y = 0.01;
      cfg.polish_iters = 300;
      break;
    case Family::Bertrand:
      cfg.iters = 250;
      cfg.eta_theta = cfg.eta_y = 0.3;
      cfg.polish_iters = 300;
      break;
    case Family::FisherLinear:
      if (mode == ParamMode::TypesAndBudgets) {
        cfg.iters = 15000;
        cfg.eta_theta = 0.003;
        cfg.eta_y = 0.01;
      } else {
        cfg.iters = 5000;
        cfg.eta_theta = cfg.eta_y = 0.01;
      }
      break;
    default:
      cfg.iters = 5000;
      cfg.eta_theta = cfg.eta_y = 0.01;
      break;
  }
  return cfg;
}

namespace {

// Per-buyer unit-sum normalization of the type blocks of a packed
// [types; budgets] vector; budgets pass through.
Vec normalize_type_blocks(const Vec& packed, Index n_buyers, Index n_goods) {
  Vec out = packed;
  for (Index i = 0; i < n_buyers; ++i) {
    const double s = packed.segment(i * n_goods, n_goods).sum();
    if (s > 0.0) out.segment(i * n_goods, n_goods) /= s;
  }
  return out;
}

double rel_l2(const Vec& a, const Vec& b) { return (a - b).cwiseQuotient(b).norm(); }

}  // namespace

InstanceRow run_instance(const GameInstance& inst, ParamMode mode, const BenchSpec& spec,
                         SolveTrace* trace_out) {
  InstanceRow row;
  row.seed = inst.seed;
  row.resamples = inst.resamples;
  try {
    const bool cd_lift = inst.family == Family::FisherCobbDouglas &&
                         mode == ParamMode::TypesAndBudgets;
    const ParametricGame game =
        cd_lift ? eg_game_cd_scaled(inst.market.n_buyers(), inst.market.n_goods())
                : inst.make_game(mode);
    const Vec theta_star_solver =
        cd_lift ? pack_cd_scaled(inst.market) : inst.true_params(mode);
    const Vec theta_star = inst.true_params(mode);

    InverseGame inv{game, inst.observed()};
    GdaConfig cfg = benchmark_solver_defaults(inst.family, mode);
    if (spec.iters) cfg.iters = *spec.iters;
    if (spec.eta_theta) cfg.eta_theta = *spec.eta_theta;
    if (spec.eta_y) cfg.eta_y = *spec.eta_y;
    if (spec.polish_iters) cfg.polish_iters = *spec.polish_iters;
    cfg.trace_stride = spec.trace_stride;
    cfg.theta0 = centroid(game.param_space);
    cfg.y0 = inv.observed.flat;
    if (spec.early_stop) {
      cfg.stop_rel_tol = 0.1;
      cfg.theta_star = theta_star_solver;
    }

    const SolveTrace trace = gda_solve(inv, cfg);
    if (trace_out) *trace_out = trace;

    Vec theta_hat = trace.theta_hat;
    double certificate = trace.certificate;
    std::string method = trace.certificate_method;
    if (cd_lift) {
      // Map budget-scaled types back to the packed [types; budgets] vector
      // and certify in the packed game.
      theta_hat =
          scaled_types_to_packed(theta_hat, inst.market.n_buyers(), inst.market.n_goods());
      const ParametricGame packed_game = inst.make_game(mode);
      const Exploitability cert = exploitability(packed_game, theta_hat, inv.observed.flat);
      certificate = cert.value;
      method = cert.method;
    }

    row.ok = true;
    row.recovered = trace.early_stopped || recovery_check(theta_hat, theta_star);
    row.rel_error = rel_l2(theta_hat, theta_star);
    row.certificate = certificate;
    row.cert_method = method;
    row.iters = trace.iters_used;
    row.wall_ms = trace.wall_ms;
    row.early_stopped = trace.early_stopped;

    if (inst.family == Family::FisherLinear && mode == ParamMode::TypesAndBudgets) {
      const Index n = inst.market.n_buyers(), m = inst.market.n_goods();
      Vec hat_n = normalize_type_blocks(theta_hat, n, m);
      Vec star_n = normalize_type_blocks(theta_star, n, m);
      row.rel_error_normalized = rel_l2(hat_n, star_n);
      row.recovered_normalized = row.rel_error_normalized <= 0.1;
    }
  } catch (const std::exception& e) {
    row.ok = false;
    row.error = e.what();
  }
  return row;
}

BenchReport run_benchmark(const BenchSpec& spec) {
  if (spec.n_instances < 1) throw std::invalid_argument("run_benchmark: n_instances >= 1");
  const auto t0 = std::chrono::steady_clock::now();

  BenchReport report;
  report.family = spec.family;
  report.mode = spec.mode;
  report.n_instances = spec.n_instances;
  report.master_seed = spec.master_seed;
  report.early_stop = spec.early_stop;
  {
    GdaConfig cfg = benchmark_solver_defaults(spec.family, spec.mode);
    report.iters = spec.iters.value_or(cfg.iters);
    report.eta_theta = spec.eta_theta.value_or(cfg.eta_theta);
    report.eta_y = spec.eta_y.value_or(cfg.eta_y);
    report.polish_iters = spec.polish_iters.value_or(cfg.polish_iters);
  }

  report.rows.resize(static_cast<std::size_t>(spec.n_instances));
  if (spec.trace_stride > 0)
    report.traces.resize(static_cast<std::size_t>(spec.n_instances));

  const Rng master(spec.master_seed);
  auto work = [&](int index) {
    Rng sub = master.substream(static_cast<std::uint64_t>(index));
    InstanceRow row;
    try {
      const GameInstance inst = sample_instance(spec.family, sub);
      row = run_instance(inst, spec.mode, spec,
                         spec.trace_stride > 0 ? &report.traces[index] : nullptr);
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
      row.seed = sub.seed();
    }
    row.index = index;
    report.rows[static_cast<std::size_t>(index)] = row;
  };

  int pool = spec.parallelism > 0 ? spec.parallelism
                                  : static_cast<int>(std::thread::hardware_concurrency());
  pool = std::max(1, std::min(pool, spec.n_instances));
  if (pool == 1) {
    for (int i = 0; i < spec.n_instances; ++i) work(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(pool));
    for (int w = 0; w < pool; ++w) {
      workers.emplace_back([&] {
        for (int i = next.fetch_add(1); i < spec.n_instances; i = next.fetch_add(1)) work(i);
      });
    }
    for (auto& th : workers) th.join();
  }
  report.parallelism = pool;

  int recovered = 0, recovered_norm = 0, norm_applicable = 0;
  double cert_sum = 0.0;
  for (const InstanceRow& row : report.rows) {
    if (!row.ok) {
      ++report.n_failed;
      continue;
    }
    recovered += row.recovered;
    cert_sum += row.certificate;
    if (!std::isnan(row.rel_error_normalized)) {
      ++norm_applicable;
      recovered_norm += row.recovered_normalized;
    }
  }
  report.pct_recovered = 100.0 * recovered / static_cast<double>(spec.n_instances);
  report.avg_exploitability = cert_sum / static_cast<double>(spec.n_instances);
  if (norm_applicable > 0)
    report.pct_recovered_normalized =
        100.0 * recovered_norm / static_cast<double>(norm_applicable);
  report.wall_ms_total =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

namespace {

json row_json(const InstanceRow& r) {
  json j;
  j["index"] = r.index;
  j["seed"] = r.seed;
  j["ok"] = r.ok;
  if (!r.ok) j["error"] = r.error;
  j["recovered"] = r.recovered;
  j["rel_error"] = r.rel_error;
  if (!std::isnan(r.rel_error_normalized)) {
    j["rel_error_normalized"] = r.rel_error_normalized;
    j["recovered_normalized"] = r.recovered_normalized;
  }
  j["certificate"] = r.certificate;
  j["certificate_method"] = r.cert_method;
  j["iters"] = r.iters;
  j["wall_ms"] = r.wall_ms;
  j["early_stopped"] = r.early_stopped;
  j["resamples"] = r.resamples;
  return j;
}

}  // namespace

std::string report_json(const BenchReport& report) {
  json j;
  j["schema"] = "igt.bench_report.v1";
  j["family"] = to_string(report.family);
  j["mode"] = to_string(report.mode);
  j["n_instances"] = report.n_instances;
  j["master_seed"] = report.master_seed;
  j["pct_recovered"] = report.pct_recovered;
  if (!std::isnan(report.pct_recovered_normalized))
    j["pct_recovered_normalized"] = report.pct_recovered_normalized;
  j["avg_exploitability"] = report.avg_exploitability;
  j["n_failed"] = report.n_failed;
  j["config"] = {
      {"iters", report.iters},
      {"eta_theta", report.eta_theta},
      {"eta_y", report.eta_y},
      {"polish_iters", report.polish_iters},
      {"early_stop", report.early_stop},
      {"parallelism", report.parallelism},
      {"sampling_floor", report.sampling_floor},
      {"recovery_tol", report.recovery_tol},
  };
  j["wall_ms_total"] = report.wall_ms_total;
  json rows = json::array();
  for (const InstanceRow& r : report.rows) rows.push_back(row_json(r));
  j["rows"] = rows;
  return j.dump(2);
}

void write_report_csv(const BenchReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_report_csv: cannot open " + path);
  out << "index,seed,ok,recovered,rel_error,rel_error_normalized,recovered_normalized,"
         "certificate,certificate_method,iters,wall_ms,early_stopped,resamples\n";
  out.precision(17);
  for (const InstanceRow& r : report.rows) {
    out << r.index << ',' << r.seed << ',' << r.ok << ',' << r.recovered << ',' << r.rel_error
        << ',';
    if (std::isnan(r.rel_error_normalized))
      out << ",,";
    else
      out << r.rel_error_normalized << ',' << r.recovered_normalized << ',';
    out << r.certificate << ',' << r.cert_method << ',' << r.iters << ',' << r.wall_ms << ','
        << r.early_stopped << ',' << r.resamples << '\n';
  }
}

}  // namespace igt
