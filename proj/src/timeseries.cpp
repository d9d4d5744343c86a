#include "igt/timeseries.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace igt {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

Mat window_rows(const std::vector<Vec>& rows, int horizon) {
  const int n_windows = static_cast<int>(rows.size()) / horizon;
  if (n_windows == 0 || rows.empty()) return Mat(0, 0);
  const Index per = rows.front().size();
  Mat out(n_windows, horizon * per);
  for (int w = 0; w < n_windows; ++w)
    for (int t = 0; t < horizon; ++t)
      out.row(w).segment(t * per, per) =
          rows[static_cast<std::size_t>(w * horizon + t)].transpose();
  return out;
}

}  // namespace

ObservationSet ingest_timeseries(const std::string& path, const TimeSeriesSchema& schema) {
  if (schema.horizon < 1) throw std::invalid_argument("ingest_timeseries: horizon >= 1");
  std::ifstream in(path);
  if (!in) throw std::runtime_error("ingest_timeseries: cannot open " + path);

  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("ingest_timeseries: empty file " + path);
  const std::vector<std::string> header = split_csv_line(line);

  const auto col_of = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw std::runtime_error("ingest_timeseries: no column named '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t ts_col = col_of(schema.timestamp_column);

  std::vector<std::string> value_names = schema.value_columns;
  if (value_names.empty()) {
    for (const std::string& name : header)
      if (name != schema.timestamp_column) value_names.push_back(name);
  }
  std::vector<std::size_t> value_cols;
  for (const std::string& name : value_names) value_cols.push_back(col_of(name));

  std::vector<std::string> stamps;
  std::vector<Vec> train_rows, val_rows, test_rows;
  int line_no = 1;
  std::string prev_stamp;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() < header.size())
      throw std::runtime_error("ingest_timeseries: line " + std::to_string(line_no) +
                               " has " + std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(header.size()));
    const std::string& stamp = cells[ts_col];
    if (!prev_stamp.empty() && !(prev_stamp < stamp))
      throw std::runtime_error("ingest_timeseries: non-monotone timestamp at line " +
                               std::to_string(line_no));
    prev_stamp = stamp;

    Vec row(static_cast<Index>(value_cols.size()));
    for (std::size_t k = 0; k < value_cols.size(); ++k) {
      const std::string& cell = cells[value_cols[k]];
      try {
        std::size_t used = 0;
        row[static_cast<Index>(k)] = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw std::runtime_error("ingest_timeseries: bad value '" + cell + "' in column '" +
                                 value_names[k] + "' at line " + std::to_string(line_no));
      }
    }
    if (!schema.train_until.empty() && stamp >= schema.train_until) {
      if (!schema.val_until.empty() && stamp >= schema.val_until)
        test_rows.push_back(std::move(row));
      else
        val_rows.push_back(std::move(row));
    } else {
      train_rows.push_back(std::move(row));
    }
  }

  ObservationSet out;
  out.columns = value_names;
  out.horizon = schema.horizon;
  out.train = window_rows(train_rows, schema.horizon);
  out.val = window_rows(val_rows, schema.horizon);
  out.test = window_rows(test_rows, schema.horizon);
  return out;
}

}  // namespace igt
