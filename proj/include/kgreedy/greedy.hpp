#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "kgreedy/candidate_set.hpp"
#include "kgreedy/kernel.hpp"

namespace kgreedy {

enum class SelectionRuleKind {
  PGreedy,      // maximize the power function
  FGreedy,      // maximize |residual|
  FOverPGreedy  // maximize |residual| / power
};

struct SelectionRule {
  SelectionRuleKind kind = SelectionRuleKind::PGreedy;
  // Weak-greedy factor in (0, 1]. With gamma < 1 any candidate whose score
  // reaches gamma * max is admissible; the choice among admissible ids is
  // randomized but fully determined by (weak_seed, step).
  double gamma = 1.0;
  std::uint64_t weak_seed = 0;
  // Target values at every candidate; required for the residual rules.
  std::vector<double> target;
};

enum class StopReason { Running, MaxPoints, PowerTolReached, NumericalRank };

std::string to_string(StopReason r);

struct TraceEntry {
  int step = 0;          // 1-based
  int selected_id = -1;  // candidate id
  double sigma = 0.0;    // max selection score before this step's update
  double seconds = 0.0;  // wall time of the step
};

// Pivots below this (squared power scale) terminate a run: the Newton
// column can no longer be formed stably.
inline constexpr double kPivotTol2 = 1e-14;

struct GreedyState {
  KernelSpec kernel = KernelSpec::matern_basic();
  std::shared_ptr<const CandidateSet> candidates;

  std::vector<int> selected;                 // ids in selection order
  std::vector<char> is_selected;             // mask over candidates
  std::vector<std::vector<double>> newton;   // column j: N_j at all candidates
  std::vector<double> newton_diag;           // pivot values P_{j-1}(x_j)
  std::vector<double> power2;                // squared power at all candidates
  std::vector<double> residual;              // residual-rule state; else empty
  std::vector<TraceEntry> trace;

  // Most negative squared-power value seen before clamping to zero; stays
  // within roundoff of zero for a healthy run.
  double min_power2_preclamp = 0.0;
};

GreedyState init(KernelSpec kernel, std::shared_ptr<const CandidateSet> candidates);

struct StepOutcome {
  bool selected = false;
  int id = -1;
  double score = 0.0;  // score of the chosen candidate before the update
  StopReason stop = StopReason::Running;  // set when !selected
};

// One selection plus the rank-one Newton/power update, O(N * n). A pivot
// below kPivotTol2 is reported via `stop`, not thrown.
StepOutcome step(GreedyState& state, const SelectionRule& rule);

struct StopCriteria {
  int max_points = 0;
  double power_tol = 0.0;  // on the power scale, i.e. sqrt(power2)
};

struct GreedyTrace {
  std::vector<TraceEntry> entries;
  std::vector<int> selected_ids;
  PointList selected_points;
  std::vector<std::int64_t> selected_parent_ids;  // -1 when the set has none
  StopReason stop = StopReason::Running;
  GreedyState final_state;
};

GreedyTrace run(const KernelSpec& kernel,
                std::shared_ptr<const CandidateSet> candidates,
                const SelectionRule& rule, const StopCriteria& stop);

// Dense-solve power function: P(x) = sqrt(k(x,x) - k_x^T A^{-1} k_x).
// Independent of the incremental update; rejects ill-conditioned node sets.
std::vector<double> power_direct(const KernelSpec& k, const PointList& nodes,
                                 const PointList& eval_pts);

// Kernel interpolant through the selected nodes, evaluated at eval_pts.
// f_at_selected follows the selection order of `state`.
std::vector<double> interpolate(const GreedyState& state,
                                std::span<const double> f_at_selected,
                                const PointList& eval_pts);

// Max |P_parent - P_sub| over all points of `sub`, with nodes given by
// sub-local ids. Both powers are computed by power_direct on bitwise equal
// coordinates, so the result must be exactly zero.
double restriction_check(const KernelSpec& k, const CandidateSet& parent,
                         const CandidateSet& sub, std::span<const int> node_ids);

}  // namespace kgreedy
