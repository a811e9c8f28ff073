#include "kgreedy/trace_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace kgreedy {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_trace_csv(std::ostream& os, const GreedyTrace& trace) {
  const int d = trace.selected_points.dim;
  os << "step,selected_id";
  for (int j = 0; j < d; ++j) os << ",x" << j;
  os << ",sigma,stop_reason\n";
  for (std::size_t i = 0; i < trace.entries.size(); ++i) {
    const TraceEntry& e = trace.entries[i];
    os << e.step << ',' << e.selected_id;
    const PointView p = trace.selected_points.point(i);
    for (int j = 0; j < d; ++j) os << ',' << fmt17(p[j]);
    os << ',' << fmt17(e.sigma) << ',';
    if (i + 1 == trace.entries.size()) os << to_string(trace.stop);
    os << '\n';
  }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

TraceFile read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace: " + path.string());
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("trace has no header: " + path.string());
  const auto header = split_csv_line(line);
  if (header.size() < 4 || header.front() != "step" || header.back() != "stop_reason")
    throw std::runtime_error("unrecognized trace header: " + path.string());
  const int d = static_cast<int>(header.size()) - 4;

  TraceFile tf;
  tf.dim = d;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw std::runtime_error("ragged trace row: " + path.string());
    TraceRow row;
    row.step = std::stoi(cells[0]);
    row.selected_id = std::stoi(cells[1]);
    for (int j = 0; j < d; ++j)
      row.x.push_back(std::stod(cells[static_cast<std::size_t>(2 + j)]));
    row.sigma = std::stod(cells[cells.size() - 2]);
    row.stop_reason = cells.back();
    if (!row.stop_reason.empty()) tf.stop_reason = row.stop_reason;
    tf.rows.push_back(std::move(row));
  }
  return tf;
}

void write_power_csv(std::ostream& os, const GreedyState& state) {
  const CandidateSet& cs = *state.candidates;
  os << "id";
  for (int j = 0; j < cs.dim(); ++j) os << ",x" << j;
  os << ",power\n";
  for (std::size_t i = 0; i < cs.size(); ++i) {
    os << i;
    const PointView p = cs.point(i);
    for (int j = 0; j < cs.dim(); ++j) os << ',' << fmt17(p[j]);
    os << ',' << fmt17(std::sqrt(std::max(state.power2[i], 0.0))) << '\n';
  }
}

}  // namespace kgreedy
