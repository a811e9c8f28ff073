#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "kgreedy/config.hpp"

namespace kgreedy {

struct ExperimentArtifacts {
  std::filesystem::path dir;
  std::filesystem::path manifest;
  std::filesystem::path trace_super;
  std::filesystem::path trace_sub;
  std::filesystem::path selected_super;
  std::filesystem::path selected_sub;
  std::vector<std::filesystem::path> fit_files;
  std::vector<std::filesystem::path> verdict_files;
  std::filesystem::path plot;
  StopReason stop_super = StopReason::Running;
  StopReason stop_sub = StopReason::Running;
  int points_super = 0;
  int points_sub = 0;
};

// Root directory for experiment outputs; overridden by this variable.
inline constexpr const char* kOutputRootEnv = "KGREEDY_OUTPUT_ROOT";
std::filesystem::path output_root();

// Runs the kernel greedy on the super- and sub-domain, writes traces,
// selected points, requested fits, stability verdicts, the plot and a
// manifest. The manifest is written up front with status "running" and
// finalized to "complete", so an interrupted run is detectable.
ExperimentArtifacts run_experiment(const ExperimentConfig& cfg);

// Re-renders the decay/scatter SVG from the trace CSVs in `dir`.
std::filesystem::path emit_plot(const std::filesystem::path& dir);

struct TheoryReport {
  int instances = 0;
  int checks = 0;
  int violations = 0;
};

// Random abstract instances; every admissible (N, K <= 6, m) combination is
// checked against greedy width bounds. One CSV row per check:
// instance_seed,N,K,m,lhs,rhs,holds.
TheoryReport verify_theory(int seed_count, std::uint64_t seed_base,
                           std::ostream* report_csv);

ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace kgreedy
