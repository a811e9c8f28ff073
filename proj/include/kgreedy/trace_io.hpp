#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "kgreedy/greedy.hpp"

namespace kgreedy {

// %.17g: round-trip exact and byte-stable for equal doubles.
std::string fmt17(double v);

// Columns: step,selected_id,x0..x{d-1},sigma,stop_reason. One row per
// selection, step is 1-based, stop_reason is filled on the last row only.
void write_trace_csv(std::ostream& os, const GreedyTrace& trace);

struct TraceRow {
  int step = 0;
  int selected_id = -1;
  std::vector<double> x;
  double sigma = 0.0;
  std::string stop_reason;
};

struct TraceFile {
  std::vector<TraceRow> rows;
  int dim = 0;
  std::string stop_reason;
};

TraceFile read_trace_csv(const std::filesystem::path& path);

// Columns: id,x0..x{d-1},power.
void write_power_csv(std::ostream& os, const GreedyState& state);

}  // namespace kgreedy
