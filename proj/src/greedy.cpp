#include "kgreedy/greedy.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace kgreedy {

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::Running: return "running";
    case StopReason::MaxPoints: return "max_points";
    case StopReason::PowerTolReached: return "power_tol";
    case StopReason::NumericalRank: return "numerical_rank";
  }
  return "unknown";
}

GreedyState init(KernelSpec kernel, std::shared_ptr<const CandidateSet> candidates) {
  if (!candidates) throw std::invalid_argument("init: null candidate set");
  GreedyState s;
  s.kernel = std::move(kernel);
  s.candidates = std::move(candidates);
  s.power2 = diag(s.kernel, s.candidates->points());
  s.is_selected.assign(s.candidates->size(), 0);
  return s;
}

namespace {

void validate_rule(const GreedyState& s, const SelectionRule& rule) {
  if (!(rule.gamma > 0.0) || rule.gamma > 1.0)
    throw std::invalid_argument("step: gamma must lie in (0, 1]");
  if (rule.kind != SelectionRuleKind::PGreedy &&
      rule.target.size() != s.candidates->size())
    throw std::invalid_argument("step: residual rule needs one target value per candidate");
}

double rule_score(const GreedyState& s, const SelectionRule& rule, std::size_t i) {
  switch (rule.kind) {
    case SelectionRuleKind::PGreedy:
      return std::sqrt(std::max(s.power2[i], 0.0));
    case SelectionRuleKind::FGreedy:
      return std::fabs(s.residual[i]);
    case SelectionRuleKind::FOverPGreedy: {
      // Candidates whose power already collapsed cannot pivot; exclude them.
      if (s.power2[i] <= kPivotTol2) return -1.0;
      return std::fabs(s.residual[i]) / std::sqrt(s.power2[i]);
    }
  }
  return 0.0;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

StepOutcome step(GreedyState& s, const SelectionRule& rule) {
  const auto t0 = std::chrono::steady_clock::now();
  validate_rule(s, rule);
  const CandidateSet& cs = *s.candidates;
  const std::size_t n_cand = cs.size();

  if (rule.kind != SelectionRuleKind::PGreedy && s.residual.empty())
    s.residual.assign(rule.target.begin(), rule.target.end());

  // Strict > keeps the lowest id on ties.
  int best = -1;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n_cand; ++i) {
    if (s.is_selected[i]) continue;
    const double sc = rule_score(s, rule, i);
    if (sc > best_score) {
      best_score = sc;
      best = static_cast<int>(i);
    }
  }
  if (best < 0)
    throw std::invalid_argument("step: all candidates already selected");

  int chosen = best;
  double chosen_score = best_score;
  if (rule.gamma < 1.0) {
    std::vector<int> admissible;
    for (std::size_t i = 0; i < n_cand; ++i) {
      if (s.is_selected[i]) continue;
      if (rule_score(s, rule, i) >= rule.gamma * best_score)
        admissible.push_back(static_cast<int>(i));
    }
    const auto step_index = static_cast<std::uint64_t>(s.selected.size());
    std::mt19937_64 rng(mix64(rule.weak_seed) ^ mix64(step_index + 1));
    std::uniform_int_distribution<std::size_t> pick(0, admissible.size() - 1);
    chosen = admissible[pick(rng)];
    chosen_score = rule_score(s, rule, static_cast<std::size_t>(chosen));
  }

  const double pivot2 = s.power2[static_cast<std::size_t>(chosen)];
  if (pivot2 < kPivotTol2)
    return StepOutcome{false, -1, 0.0, StopReason::NumericalRank};
  const double pivot = std::sqrt(pivot2);

  // Next Newton basis column over all candidates.
  std::vector<double> col(n_cand);
  const PointView xc = cs.point(static_cast<std::size_t>(chosen));
  for (std::size_t i = 0; i < n_cand; ++i) col[i] = eval(s.kernel, cs.point(i), xc);
  for (std::size_t j = 0; j < s.newton.size(); ++j) {
    const double nj_sel = s.newton[j][static_cast<std::size_t>(chosen)];
    const std::vector<double>& nj = s.newton[j];
    for (std::size_t i = 0; i < n_cand; ++i) col[i] -= nj[i] * nj_sel;
  }
  for (std::size_t i = 0; i < n_cand; ++i) col[i] /= pivot;

  for (std::size_t i = 0; i < n_cand; ++i) {
    const double p = s.power2[i] - col[i] * col[i];
    s.min_power2_preclamp = std::min(s.min_power2_preclamp, p);
    s.power2[i] = std::max(p, 0.0);
  }
  s.power2[static_cast<std::size_t>(chosen)] = 0.0;

  if (!s.residual.empty()) {
    const double c = s.residual[static_cast<std::size_t>(chosen)] / pivot;
    for (std::size_t i = 0; i < n_cand; ++i) s.residual[i] -= c * col[i];
  }

  s.newton.push_back(std::move(col));
  s.newton_diag.push_back(pivot);
  s.is_selected[static_cast<std::size_t>(chosen)] = 1;
  s.selected.push_back(chosen);

  const auto t1 = std::chrono::steady_clock::now();
  TraceEntry e;
  e.step = static_cast<int>(s.selected.size());
  e.selected_id = chosen;
  e.sigma = best_score;
  e.seconds = std::chrono::duration<double>(t1 - t0).count();
  s.trace.push_back(e);
  return StepOutcome{true, chosen, chosen_score, StopReason::Running};
}

GreedyTrace run(const KernelSpec& kernel,
                std::shared_ptr<const CandidateSet> candidates,
                const SelectionRule& rule, const StopCriteria& stop) {
  if (stop.max_points < 1)
    throw std::invalid_argument("run: max_points must be >= 1");
  GreedyState s = init(kernel, candidates);
  const std::size_t limit =
      std::min<std::size_t>(static_cast<std::size_t>(stop.max_points), s.candidates->size());
  StopReason reason = StopReason::Running;
  while (s.selected.size() < limit) {
    if (stop.power_tol > 0.0) {
      double pmax = 0.0;
      for (std::size_t i = 0; i < s.power2.size(); ++i)
        if (!s.is_selected[i]) pmax = std::max(pmax, s.power2[i]);
      if (std::sqrt(pmax) <= stop.power_tol) {
        reason = StopReason::PowerTolReached;
        break;
      }
    }
    const StepOutcome out = step(s, rule);
    if (!out.selected) {
      reason = out.stop;
      break;
    }
  }
  if (reason == StopReason::Running) reason = StopReason::MaxPoints;

  GreedyTrace t;
  t.entries = s.trace;
  t.selected_ids = s.selected;
  t.selected_points.dim = s.candidates->dim();
  for (int id : s.selected) {
    t.selected_points.push_back(s.candidates->point(static_cast<std::size_t>(id)));
    t.selected_parent_ids.push_back(s.candidates->parent_id(static_cast<std::size_t>(id)));
  }
  t.stop = reason;
  t.final_state = std::move(s);
  return t;
}

std::vector<double> power_direct(const KernelSpec& k, const PointList& nodes,
                                 const PointList& eval_pts) {
  std::vector<double> out(eval_pts.size());
  if (nodes.size() == 0) {
    for (std::size_t i = 0; i < eval_pts.size(); ++i)
      out[i] = std::sqrt(std::max(eval(k, eval_pts.point(i), eval_pts.point(i)), 0.0));
    return out;
  }
  const Eigen::MatrixXd A = gram(k, nodes);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  const double lmax = es.eigenvalues()(es.eigenvalues().size() - 1);
  if (!(lmin > 0.0) || lmax / lmin > 1e15) {
    std::ostringstream msg;
    msg << "power_direct: gram matrix ill-conditioned (lambda_min=" << lmin
        << ", lambda_max=" << lmax << ")";
    throw std::runtime_error(msg.str());
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("power_direct: Cholesky factorization failed");

  const auto n = static_cast<Eigen::Index>(nodes.size());
  Eigen::VectorXd kx(n);
  for (std::size_t i = 0; i < eval_pts.size(); ++i) {
    const PointView p = eval_pts.point(i);
    for (Eigen::Index j = 0; j < n; ++j)
      kx(j) = eval(k, p, nodes.point(static_cast<std::size_t>(j)));
    const Eigen::VectorXd t = llt.solve(kx);
    const double p2 = eval(k, p, p) - kx.dot(t);
    out[i] = std::sqrt(std::max(p2, 0.0));
  }
  return out;
}

std::vector<double> interpolate(const GreedyState& state,
                                std::span<const double> f_at_selected,
                                const PointList& eval_pts) {
  const std::size_t n = state.selected.size();
  if (f_at_selected.size() != n)
    throw std::invalid_argument("interpolate: one value per selected node required");
  std::vector<double> out(eval_pts.size(), 0.0);
  if (n == 0) return out;

  // Newton coefficients by forward substitution: the collocation matrix
  // N_j(x_i) is lower triangular with the pivots on the diagonal.
  std::vector<double> c(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = f_at_selected[i];
    const auto sel_i = static_cast<std::size_t>(state.selected[i]);
    for (std::size_t j = 0; j < i; ++j) v -= c[j] * state.newton[j][sel_i];
    c[i] = v / state.newton_diag[i];
  }

  std::vector<double> nv(n);
  for (std::size_t e = 0; e < eval_pts.size(); ++e) {
    const PointView p = eval_pts.point(e);
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const auto sel_j = static_cast<std::size_t>(state.selected[j]);
      double v = eval(state.kernel, p, state.candidates->point(sel_j));
      for (std::size_t l = 0; l < j; ++l) v -= nv[l] * state.newton[l][sel_j];
      nv[j] = v / state.newton_diag[j];
      s += c[j] * nv[j];
    }
    out[e] = s;
  }
  return out;
}

double restriction_check(const KernelSpec& k, const CandidateSet& parent,
                         const CandidateSet& sub, std::span<const int> node_ids) {
  if (!sub.has_parent_ids())
    throw std::invalid_argument("restriction_check: sub set has no parent mapping");
  PointList nodes_parent(parent.dim()), nodes_sub(sub.dim());
  for (int id : node_ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= sub.size())
      throw std::invalid_argument("restriction_check: node id out of range");
    const auto pid = static_cast<std::size_t>(sub.parent_id(static_cast<std::size_t>(id)));
    nodes_parent.push_back(parent.point(pid));
    nodes_sub.push_back(sub.point(static_cast<std::size_t>(id)));
  }
  PointList eval_parent(parent.dim()), eval_sub(sub.dim());
  for (std::size_t i = 0; i < sub.size(); ++i) {
    eval_parent.push_back(parent.point(static_cast<std::size_t>(sub.parent_id(i))));
    eval_sub.push_back(sub.point(i));
  }
  const std::vector<double> pa = power_direct(k, nodes_parent, eval_parent);
  const std::vector<double> pb = power_direct(k, nodes_sub, eval_sub);
  double worst = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i)
    worst = std::max(worst, std::fabs(pa[i] - pb[i]));
  return worst;
}

}  // namespace kgreedy
