#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "kgreedy/candidate_set.hpp"
#include "kgreedy/greedy.hpp"
#include "kgreedy/trace_io.hpp"

using namespace kgreedy;

namespace {

std::shared_ptr<const CandidateSet> halton_box(std::size_t n, std::uint64_t seed) {
  return std::make_shared<CandidateSet>(
      discretize(DomainSpec::box({0.0, 0.0}, {1.0, 1.0}),
                 SamplingStrategy::Halton, n, seed));
}

// Hilbert norm of f = sum c_i k(., z_i): sqrt(c^T A c).
double rkhs_norm(const KernelSpec& k, const PointList& zs,
                 const std::vector<double>& c) {
  const Eigen::MatrixXd A = gram(k, zs);
  Eigen::Map<const Eigen::VectorXd> cv(c.data(), static_cast<Eigen::Index>(c.size()));
  return std::sqrt(cv.dot(A * cv));
}

}  // namespace

TEST_SUITE("greedy") {

TEST_CASE("init carries the kernel diagonal as squared power") {
  const auto cands = halton_box(50, 1);
  GreedyState s = init(KernelSpec::gaussian(1.5), cands);
  for (double p : s.power2) CHECK(p == 1.0);
  CHECK(s.selected.empty());
  CHECK(s.trace.empty());
}

TEST_CASE("ties break to the lowest id") {
  // Unit diagonal makes every initial power equal.
  const auto cands = halton_box(20, 2);
  GreedyState s = init(KernelSpec::matern_basic(), cands);
  const StepOutcome out = step(s, SelectionRule{});
  CHECK(out.selected);
  CHECK(out.id == 0);
  CHECK(s.trace.at(0).sigma == 1.0);
}

TEST_CASE("incremental power matches the dense-solve oracle") {
  const KernelSpec kernels[] = {
      KernelSpec::matern_basic(1.0), KernelSpec::matern_linear(1.4),
      KernelSpec::matern_quadratic(0.8), KernelSpec::gaussian(1.1),
      KernelSpec::composite(KernelSpec::matern_quadratic(),
                            KernelSpec::matern_linear(),
                            DomainSpec::ball({0.5, 0.5}, 0.3))};
  for (const KernelSpec& k : kernels) {
    const auto cands = halton_box(200, 3);
    GreedyTrace t = run(k, cands, SelectionRule{}, StopCriteria{25, 0.0});
    REQUIRE(t.selected_ids.size() == 25);
    PointList nodes(cands->dim());
    for (int id : t.selected_ids)
      nodes.push_back(cands->point(static_cast<std::size_t>(id)));
    const std::vector<double> direct = power_direct(k, nodes, cands->points());
    double worst = 0.0;
    for (std::size_t i = 0; i < cands->size(); ++i)
      worst = std::max(worst,
                       std::fabs(t.final_state.power2[i] - direct[i] * direct[i]));
    CHECK(worst <= 1e-8);
  }
}

TEST_CASE("selection scores never increase for the power rule") {
  const auto cands = halton_box(300, 4);
  GreedyTrace t = run(KernelSpec::matern_linear(), cands, SelectionRule{},
                      StopCriteria{40, 0.0});
  for (std::size_t i = 1; i < t.entries.size(); ++i)
    CHECK(t.entries[i].sigma <= t.entries[i - 1].sigma);
  CHECK(t.entries.front().sigma == 1.0);
}

TEST_CASE("power at selected candidates is exactly zero and clamping is mild") {
  const auto cands = halton_box(150, 5);
  GreedyState s = init(KernelSpec::matern_quadratic(), cands);
  for (int i = 0; i < 20; ++i) {
    const StepOutcome out = step(s, SelectionRule{});
    REQUIRE(out.selected);
    CHECK(s.power2[static_cast<std::size_t>(out.id)] == 0.0);
  }
  for (int id : s.selected) CHECK(s.power2[static_cast<std::size_t>(id)] == 0.0);
  CHECK(s.min_power2_preclamp >= -1e-10);
}

TEST_CASE("flat kernels terminate on numerical rank") {
  // A nearly constant kernel has numerical rank far below the point count.
  const auto cands = halton_box(60, 6);
  GreedyTrace t = run(KernelSpec::gaussian(0.01), cands, SelectionRule{},
                      StopCriteria{60, 0.0});
  CHECK(t.stop == StopReason::NumericalRank);
  CHECK(t.selected_ids.size() < 60);
  CHECK(t.entries.size() == t.selected_ids.size());
}

TEST_CASE("power tolerance stops a run early") {
  const auto cands = halton_box(120, 7);
  GreedyTrace t = run(KernelSpec::gaussian(2.0), cands, SelectionRule{},
                      StopCriteria{120, 0.05});
  CHECK(t.stop == StopReason::PowerTolReached);
  CHECK(!t.entries.empty());
  // The next maximum power is at or below the tolerance.
  double pmax = 0.0;
  for (std::size_t i = 0; i < t.final_state.power2.size(); ++i)
    if (!t.final_state.is_selected[i])
      pmax = std::max(pmax, std::sqrt(t.final_state.power2[i]));
  CHECK(pmax <= 0.05);
  // All recorded selections were above it.
  for (const TraceEntry& e : t.entries) CHECK(e.sigma > 0.05);
}

TEST_CASE("residual rule drives the residual to zero at selected nodes") {
  const auto cands = halton_box(200, 8);
  SelectionRule rule;
  rule.kind = SelectionRuleKind::FGreedy;
  rule.target.resize(cands->size());
  for (std::size_t i = 0; i < cands->size(); ++i) {
    const PointView p = cands->point(i);
    rule.target[i] = std::sin(3.0 * p[0]) + 0.5 * std::cos(5.0 * p[1]);
  }
  GreedyTrace t = run(KernelSpec::matern_quadratic(1.5), cands, rule,
                      StopCriteria{20, 0.0});
  REQUIRE(t.selected_ids.size() == 20);
  for (int id : t.selected_ids)
    CHECK(std::fabs(t.final_state.residual[static_cast<std::size_t>(id)]) <= 1e-9);

  // The maintained residual must equal target minus the interpolant.
  std::vector<double> f_sel;
  for (int id : t.selected_ids)
    f_sel.push_back(rule.target[static_cast<std::size_t>(id)]);
  const std::vector<double> s =
      interpolate(t.final_state, f_sel, cands->points());
  for (std::size_t i = 0; i < cands->size(); ++i)
    CHECK(std::fabs(t.final_state.residual[i] - (rule.target[i] - s[i])) <= 1e-8);
}

TEST_CASE("residual-over-power rule maximizes the ratio") {
  const auto cands = halton_box(80, 9);
  SelectionRule rule;
  rule.kind = SelectionRuleKind::FOverPGreedy;
  rule.target.resize(cands->size());
  for (std::size_t i = 0; i < cands->size(); ++i)
    rule.target[i] = cands->point(i)[0];
  GreedyState s = init(KernelSpec::matern_basic(), cands);
  step(s, rule);  // residual state now exists
  for (int n = 0; n < 5; ++n) {
    const std::vector<double> power2_before = s.power2;
    const std::vector<double> residual_before = s.residual;
    const StepOutcome out = step(s, rule);
    REQUIRE(out.selected);
    double best = 0.0;
    for (std::size_t i = 0; i < cands->size(); ++i) {
      const bool was_selected =
          s.is_selected[i] && static_cast<int>(i) != out.id;
      if (was_selected || power2_before[i] <= kPivotTol2) continue;
      best = std::max(best, std::fabs(residual_before[i]) /
                                std::sqrt(power2_before[i]));
    }
    const double chosen = std::fabs(residual_before[static_cast<std::size_t>(out.id)]) /
                          std::sqrt(power2_before[static_cast<std::size_t>(out.id)]);
    CHECK(chosen == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("weak greedy stays admissible and is reproducible") {
  const auto cands = halton_box(100, 10);
  SelectionRule rule;
  rule.gamma = 0.6;
  rule.weak_seed = 42;
  GreedyState s = init(KernelSpec::matern_linear(), cands);
  for (int n = 0; n < 15; ++n) {
    const std::vector<double> power2_before = s.power2;
    std::vector<char> selected_before = s.is_selected;
    const StepOutcome out = step(s, rule);
    REQUIRE(out.selected);
    double best = 0.0;
    for (std::size_t i = 0; i < cands->size(); ++i)
      if (!selected_before[i])
        best = std::max(best, std::sqrt(std::max(power2_before[i], 0.0)));
    const double chosen =
        std::sqrt(std::max(power2_before[static_cast<std::size_t>(out.id)], 0.0));
    CHECK(chosen >= 0.6 * best - 1e-15);
    CHECK(s.trace.back().sigma == best);
  }

  const GreedyTrace a = run(KernelSpec::matern_linear(), cands, rule,
                            StopCriteria{15, 0.0});
  const GreedyTrace b = run(KernelSpec::matern_linear(), cands, rule,
                            StopCriteria{15, 0.0});
  CHECK(a.selected_ids == b.selected_ids);
  SelectionRule other = rule;
  other.weak_seed = 43;
  const GreedyTrace c = run(KernelSpec::matern_linear(), cands, other,
                            StopCriteria{15, 0.0});
  CHECK(a.selected_ids != c.selected_ids);
}

TEST_CASE("interpolation reproduces a kernel translate exactly") {
  const auto cands = halton_box(60, 11);
  const KernelSpec k = KernelSpec::matern_quadratic();
  GreedyState s = init(k, cands);
  const StepOutcome out = step(s, SelectionRule{});
  REQUIRE(out.id == 0);
  // f = k(., x_0): its interpolant on {x_0} is f itself.
  std::vector<double> f_sel = {1.0};
  const std::vector<double> vals = interpolate(s, f_sel, cands->points());
  for (std::size_t i = 0; i < cands->size(); ++i)
    CHECK(vals[i] ==
          doctest::Approx(eval(k, cands->point(i), cands->point(0))).epsilon(1e-12));
}

TEST_CASE("interpolation matches the dense linear solve") {
  const auto cands = halton_box(150, 12);
  const KernelSpec k = KernelSpec::matern_basic(1.3);
  SelectionRule rule;
  GreedyTrace t = run(k, cands, rule, StopCriteria{18, 0.0});
  PointList nodes(cands->dim());
  std::vector<double> f_sel;
  for (int id : t.selected_ids) {
    const PointView p = cands->point(static_cast<std::size_t>(id));
    nodes.push_back(p);
    f_sel.push_back(std::exp(-p[0]) * (1.0 + p[1]));
  }
  const std::vector<double> newton_vals =
      interpolate(t.final_state, f_sel, cands->points());

  const Eigen::MatrixXd A = gram(k, nodes);
  Eigen::Map<const Eigen::VectorXd> fv(f_sel.data(),
                                       static_cast<Eigen::Index>(f_sel.size()));
  const Eigen::VectorXd coef = A.ldlt().solve(fv);
  for (std::size_t i = 0; i < cands->size(); ++i) {
    double direct = 0.0;
    for (std::size_t j = 0; j < nodes.size(); ++j)
      direct += coef(static_cast<Eigen::Index>(j)) *
                eval(k, cands->point(i), nodes.point(j));
    CHECK(newton_vals[i] == doctest::Approx(direct).epsilon(1e-8));
  }
}

TEST_CASE("pointwise interpolation error obeys the power bound") {
  const auto cands = halton_box(250, 13);
  const KernelSpec k = KernelSpec::gaussian(1.2);
  // f lives in the native space by construction.
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> cu(-2.0, 2.0);
  PointList zs(2);
  std::vector<double> c;
  for (int i = 0; i < 6; ++i) {
    const double z[] = {u(rng), u(rng)};
    zs.push_back({z, 2});
    c.push_back(cu(rng));
  }
  const double fnorm = rkhs_norm(k, zs, c);
  std::vector<double> fvals(cands->size(), 0.0);
  for (std::size_t i = 0; i < cands->size(); ++i)
    for (std::size_t j = 0; j < zs.size(); ++j)
      fvals[i] += c[j] * eval(k, cands->point(i), zs.point(j));

  GreedyTrace t = run(k, cands, SelectionRule{}, StopCriteria{25, 0.0});
  std::vector<double> f_sel;
  for (int id : t.selected_ids) f_sel.push_back(fvals[static_cast<std::size_t>(id)]);
  const std::vector<double> s = interpolate(t.final_state, f_sel, cands->points());
  for (std::size_t i = 0; i < cands->size(); ++i) {
    const double p = std::sqrt(std::max(t.final_state.power2[i], 0.0));
    CHECK(std::fabs(fvals[i] - s[i]) <= p * fnorm + 1e-9);
  }
  // Node reproduction.
  for (std::size_t i = 0; i < t.selected_ids.size(); ++i) {
    const auto id = static_cast<std::size_t>(t.selected_ids[i]);
    CHECK(std::fabs(s[id] - fvals[id]) <= 1e-9);
  }
}

TEST_CASE("empty node set gives the raw kernel diagonal as power") {
  const auto cands = halton_box(30, 14);
  PointList none(2);
  const std::vector<double> p =
      power_direct(KernelSpec::matern_basic(), none, cands->points());
  for (double v : p) CHECK(v == 1.0);
  GreedyState s = init(KernelSpec::matern_basic(), cands);
  const std::vector<double> zero =
      interpolate(s, std::span<const double>{}, cands->points());
  for (double v : zero) CHECK(v == 0.0);
}

TEST_CASE("single-node power has a closed form") {
  const auto cands = halton_box(40, 15);
  const KernelSpec k = KernelSpec::matern_linear(1.6);
  PointList node(2);
  node.push_back(cands->point(7));
  const std::vector<double> p = power_direct(k, node, cands->points());
  for (std::size_t i = 0; i < cands->size(); ++i) {
    const double kxz = eval(k, cands->point(i), cands->point(7));
    const double expected = std::sqrt(std::max(1.0 - kxz * kxz, 0.0));
    CHECK(p[i] == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("power of a restricted set is the restricted power") {
  const DomainSpec box = DomainSpec::box({0.0, 0.0}, {1.0, 1.0});
  const CandidateSet parent = discretize(box, SamplingStrategy::Grid, 400, 0);
  const DomainSpec cusp = DomainSpec::intersect_norm_greater(box, 1.0);
  const CandidateSet sub = restrict_to(parent, cusp);
  std::vector<int> nodes;
  for (int i = 0; i < 6; ++i)
    nodes.push_back(static_cast<int>(i * sub.size() / 7));
  const KernelSpec kernels[] = {
      KernelSpec::matern_basic(), KernelSpec::gaussian(0.9),
      KernelSpec::composite(KernelSpec::matern_quadratic(),
                            KernelSpec::matern_linear(),
                            DomainSpec::ball({0.0, 0.0}, 0.5))};
  for (const KernelSpec& k : kernels)
    CHECK(restriction_check(k, parent, sub, nodes) == 0.0);
}

TEST_CASE("restriction check requires a parent mapping") {
  const DomainSpec box = DomainSpec::box({0.0, 0.0}, {1.0, 1.0});
  const CandidateSet parent = discretize(box, SamplingStrategy::Grid, 25, 0);
  const std::vector<int> nodes = {0};
  CHECK_THROWS_AS(
      restriction_check(KernelSpec::matern_basic(), parent, parent, nodes),
      std::invalid_argument);
}

TEST_CASE("ill-conditioned node sets are rejected by the dense solver") {
  PointList nodes(1);
  const double a[] = {0.5};
  const double b[] = {0.5000000000000002};  // nearly coincident
  nodes.push_back({a, 1});
  nodes.push_back({b, 1});
  PointList evals(1);
  const double e[] = {0.25};
  evals.push_back({e, 1});
  CHECK_THROWS_AS(power_direct(KernelSpec::gaussian(), nodes, evals),
                  std::runtime_error);
}

TEST_CASE("trace csv round-trips and is byte-deterministic") {
  const auto cands = halton_box(50, 16);
  const GreedyTrace t = run(KernelSpec::matern_basic(), cands, SelectionRule{},
                            StopCriteria{8, 0.0});
  std::ostringstream a, b;
  write_trace_csv(a, t);
  write_trace_csv(b, t);
  CHECK(a.str() == b.str());
  CHECK(a.str().substr(0, 42) == "step,selected_id,x0,x1,sigma,stop_reason\n1");

  const auto tmp = std::filesystem::temp_directory_path() / "kgreedy_trace_test.csv";
  {
    std::ofstream out(tmp, std::ios::binary);
    out << a.str();
  }
  const TraceFile tf = read_trace_csv(tmp);
  std::filesystem::remove(tmp);
  REQUIRE(tf.rows.size() == t.entries.size());
  CHECK(tf.stop_reason == "max_points");
  for (std::size_t i = 0; i < tf.rows.size(); ++i) {
    CHECK(tf.rows[i].step == t.entries[i].step);
    CHECK(tf.rows[i].selected_id == t.entries[i].selected_id);
    CHECK(tf.rows[i].sigma == t.entries[i].sigma);  // %.17g is lossless
    CHECK(tf.rows[i].x[0] == t.selected_points.point(i)[0]);
  }
}

TEST_CASE("stepping past exhaustion is a contract violation") {
  PointList pts;
  const double a[] = {0.0};
  const double b[] = {1.0};
  pts.push_back({a, 1});
  pts.push_back({b, 1});
  const auto cands = std::make_shared<CandidateSet>(
      CandidateSet(DomainSpec::box({0.0}, {1.0}), pts));
  GreedyState s = init(KernelSpec::matern_basic(), cands);
  step(s, SelectionRule{});
  step(s, SelectionRule{});
  CHECK_THROWS_AS(step(s, SelectionRule{}), std::invalid_argument);
}

}  // TEST_SUITE
