#pragma once

#include <optional>
#include <string>
#include <vector>

#include "igt/instance.hpp"
#include "igt/inverse_planner.hpp"

namespace igt {

/// Relative-L2 parameter recovery test: ||(theta_hat - theta_star) / theta_star||_2
/// <= eps, componentwise division. Throws if theta_star has a zero component.
bool recovery_check(const Vec& theta_hat, const Vec& theta_star, double eps = 0.1);

/// One benchmark batch: sample -> invert -> score, per instance.
struct BenchSpec {
  Family family = Family::FisherLinear;
  ParamMode mode = ParamMode::BudgetsOnly;
  int n_instances = 100;
  std::uint64_t master_seed = 1;
  int parallelism = 0;  // 0: hardware concurrency
  bool early_stop = false;

  // Per-family solver defaults apply unless set.
  std::optional<int> iters;
  std::optional<double> eta_theta;
  std::optional<double> eta_y;
  std::optional<int> polish_iters;
  /// Keep every solve's strided trace for export (index -> trace CSV rows).
  int trace_stride = 0;
};

/// Solver configuration the benchmark resolves for a family/mode cell.
GdaConfig benchmark_solver_defaults(Family family, ParamMode mode);

struct InstanceRow {
  int index = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  bool recovered = false;
  double rel_error = 0.0;
  /// Linear types are identifiable only up to per-buyer scaling; the
  /// normalized check compares unit-sum type blocks. NaN when not applicable.
  double rel_error_normalized = std::numeric_limits<double>::quiet_NaN();
  bool recovered_normalized = false;
  double certificate = 0.0;
  std::string cert_method;
  int iters = 0;
  double wall_ms = 0.0;
  bool early_stopped = false;
  int resamples = 0;
};

struct BenchReport {
  // Aggregates (recomputable from rows).
  double pct_recovered = 0.0;
  double pct_recovered_normalized = std::numeric_limits<double>::quiet_NaN();
  double avg_exploitability = 0.0;
  int n_failed = 0;
  std::vector<InstanceRow> rows;

  // Config echo.
  Family family = Family::FisherLinear;
  ParamMode mode = ParamMode::BudgetsOnly;
  int n_instances = 0;
  std::uint64_t master_seed = 0;
  int parallelism = 1;
  bool early_stop = false;
  int iters = 0;
  double eta_theta = 0.0, eta_y = 0.0;
  int polish_iters = 0;
  double sampling_floor = 0.1;
  double recovery_tol = 0.1;
  double wall_ms_total = 0.0;

  std::vector<SolveTrace> traces;  // only when trace_stride > 0
};

/// Runs the batch: per-instance seed = substream(master, index); instances
/// run on a worker pool but the report is bit-identical for any parallelism
/// degree. Per-instance failures are recorded in rows, never thrown.
BenchReport run_benchmark(const BenchSpec& spec);

/// Solve a single sampled/deserialized instance; used by the CLI and tests.
InstanceRow run_instance(const GameInstance& inst, ParamMode mode, const BenchSpec& spec,
                         SolveTrace* trace_out = nullptr);

std::string report_json(const BenchReport& report);
void write_report_csv(const BenchReport& report, const std::string& path);

}  // namespace igt
