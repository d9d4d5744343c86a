#pragma once

#include <string>
#include <vector>

#include "igt/types.hpp"

namespace igt {

/// Column mapping and windowing for time-series ingestion.
struct TimeSeriesSchema {
  std::string timestamp_column = "timestamp";
  /// Values extracted per step; empty selects every non-timestamp column.
  std::vector<std::string> value_columns;
  int horizon = 24;
  /// Split boundaries compared against the raw timestamp strings
  /// (ISO-8601 timestamps order lexicographically). Empty keeps everything
  /// in train.
  std::string train_until;
  std::string val_until;
};

/// Windowed observation vectors: one row per window, per-step values
/// concatenated in column order (matching the observation-map layout).
struct ObservationSet {
  Mat train, val, test;
  std::vector<std::string> columns;
  int horizon = 0;
};

/// Reads a CSV with a header row, checks timestamps are strictly increasing,
/// and windows the series into fixed-horizon observation vectors. Malformed
/// rows raise errors naming the line.
ObservationSet ingest_timeseries(const std::string& path, const TimeSeriesSchema& schema);

}  // namespace igt
