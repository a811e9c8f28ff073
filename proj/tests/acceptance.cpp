// Acceptance gate: end-to-end checks of the experiment presets and the
// library contracts, one pass/fail line per criterion. Exits nonzero if
// any criterion fails. All tolerances are pinned here.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgreedy/abstract_greedy.hpp"
#include "kgreedy/candidate_set.hpp"
#include "kgreedy/config.hpp"
#include "kgreedy/experiment.hpp"
#include "kgreedy/greedy.hpp"
#include "kgreedy/trace_io.hpp"

using namespace kgreedy;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

struct PresetRun {
  ExperimentArtifacts art;
  double seconds = 0.0;
  std::string error;
};

std::map<std::string, PresetRun> run_presets(const fs::path& root) {
  setenv(kOutputRootEnv, root.c_str(), 1);
  fs::create_directories(root);
  std::map<std::string, PresetRun> runs;
  for (const std::string& name : preset_names()) {
    PresetRun r;
    std::cerr << "running preset " << name << " -> " << root.string() << "\n";
    const auto t0 = std::chrono::steady_clock::now();
    try {
      r.art = run_experiment(preset(name));
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    const auto t1 = std::chrono::steady_clock::now();
    r.seconds = std::chrono::duration<double>(t1 - t0).count();
    runs[name] = std::move(r);
  }
  return runs;
}

// ---- criterion 1: algebraic rates on the cusp domain ----------------------

constexpr double kBasicAlpha = 0.25, kBasicTol = 0.10;
constexpr double kLinearAlpha = 0.75, kLinearTol = 0.15;
constexpr double kRuntimeLimit = 120.0;

Outcome criterion_rate_stability(const std::map<std::string, PresetRun>& runs) {
  Outcome out;
  const PresetRun& basic = runs.at("fig2_basic_matern");
  const PresetRun& linear = runs.at("fig2_linear_matern");
  if (!basic.error.empty() || !linear.error.empty()) {
    out.detail = "preset failed: " + basic.error + linear.error;
    return out;
  }
  const json mb = read_json(basic.art.manifest);
  const double a_basic =
      read_json(basic.art.dir / "fit_sub_algebraic.json")["alpha"].get<double>();
  const double a_linear =
      read_json(linear.art.dir / "fit_sub_algebraic.json")["alpha"].get<double>();
  const int cand_sub = mb["candidates_sub"].get<int>();
  const int points = mb["points_sub"].get<int>();
  out.pass = std::fabs(a_basic - kBasicAlpha) <= kBasicTol &&
             std::fabs(a_linear - kLinearAlpha) <= kLinearTol &&
             cand_sub >= 10000 && points == 500 &&
             basic.seconds <= kRuntimeLimit && linear.seconds <= kRuntimeLimit;
  out.detail = "basic alpha " + fmt(a_basic) + ", linear alpha " + fmt(a_linear) +
               ", " + std::to_string(cand_sub) + " candidates, " +
               std::to_string(points) + " points, " + fmt(basic.seconds) + "s/" +
               fmt(linear.seconds) + "s";
  return out;
}

// ---- criterion 2: rate improvement on the annulus -------------------------

constexpr double kSuperAlpha = 0.75, kSubAlpha = 1.25, kCompositeTol = 0.20;

Outcome criterion_rate_improvement(const std::map<std::string, PresetRun>& runs) {
  Outcome out;
  const PresetRun& run = runs.at("fig1_composite");
  if (!run.error.empty()) {
    out.detail = "preset failed: " + run.error;
    return out;
  }
  const double a_super =
      read_json(run.art.dir / "fit_super_algebraic.json")["alpha"].get<double>();
  const double a_sub =
      read_json(run.art.dir / "fit_sub_algebraic.json")["alpha"].get<double>();
  const bool stable =
      read_json(run.art.dir / "verdict_algebraic.json")["stable"].get<bool>();
  out.pass = std::fabs(a_super - kSuperAlpha) <= kCompositeTol &&
             std::fabs(a_sub - kSubAlpha) <= kCompositeTol && stable;
  out.detail = "alpha super " + fmt(a_super) + ", alpha sub " + fmt(a_sub) +
               (stable ? ", verdict stable" : ", verdict UNSTABLE");
  return out;
}

// ---- criterion 3: gaussian decay class -------------------------------------

constexpr double kRmsRatio = 0.5;
constexpr double kSigmaFactor = 3.0;

Outcome criterion_gaussian_decay(const std::map<std::string, PresetRun>& runs) {
  Outcome out;
  const PresetRun& run = runs.at("fig3_gaussian");
  if (!run.error.empty()) {
    out.detail = "preset failed: " + run.error;
    return out;
  }
  double worst_ratio = 0.0;
  for (const char* which : {"super", "sub"}) {
    const double rms_log =
        read_json(run.art.dir / ("fit_" + std::string(which) +
                                 "_log_exponential.json"))["rms"].get<double>();
    const double rms_alg =
        read_json(run.art.dir / ("fit_" + std::string(which) +
                                 "_algebraic.json"))["rms"].get<double>();
    worst_ratio = std::max(worst_ratio, rms_log / rms_alg);
  }
  const TraceFile sup = read_trace_csv(run.art.trace_super);
  const TraceFile sub = read_trace_csv(run.art.trace_sub);
  const std::size_t common = std::min(sup.rows.size(), sub.rows.size());
  double worst_factor = 0.0;
  for (std::size_t i = 0; i < common; ++i)
    worst_factor =
        std::max(worst_factor, sub.rows[i].sigma / sup.rows[i].sigma);
  out.pass = worst_ratio <= kRmsRatio && worst_factor <= kSigmaFactor;
  out.detail = "rms ratio " + fmt(worst_ratio) + " (limit " + fmt(kRmsRatio) +
               "), sigma factor " + fmt(worst_factor) + " over " +
               std::to_string(common) + " steps, traces " +
               std::to_string(sup.rows.size()) + "/" +
               std::to_string(sub.rows.size());
  return out;
}

// ---- criterion 4: restriction identity -------------------------------------

Outcome criterion_restriction(int instances) {
  Outcome out;
  int exact = 0;
  double worst = 0.0;
  for (int seed = 0; seed < instances; ++seed) {
    DomainSpec parent_dom = DomainSpec::box({0.0, 0.0}, {1.0, 1.0});
    DomainSpec sub_dom = DomainSpec::intersect_norm_greater(parent_dom, 1.0);
    switch (seed % 4) {
      case 0:
        break;
      case 1:
        parent_dom = DomainSpec::ball({0.0, 0.0}, 1.0);
        sub_dom = DomainSpec::difference(parent_dom,
                                         DomainSpec::ball({0.0, 0.0}, 0.5));
        break;
      case 2:
        parent_dom = DomainSpec::box({-1.0, -1.0}, {1.0, 1.0});
        sub_dom = DomainSpec::difference(parent_dom,
                                         DomainSpec::ball({0.0, 0.0}, 0.6));
        break;
      case 3:
        parent_dom = DomainSpec::box({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0});
        sub_dom = DomainSpec::intersect_norm_greater(parent_dom, 1.0);
        break;
    }
    const SamplingStrategy strategy =
        seed % 2 == 0 ? SamplingStrategy::Grid : SamplingStrategy::Halton;
    const std::size_t target = 400 + 200 * static_cast<std::size_t>(seed % 5);
    const CandidateSet parent = discretize(
        parent_dom, strategy, target, static_cast<std::uint64_t>(seed));
    const CandidateSet sub = restrict_to(parent, sub_dom);

    KernelSpec k = KernelSpec::matern_basic();
    switch (seed % 5) {
      case 0: k = KernelSpec::matern_basic(1.0); break;
      case 1: k = KernelSpec::matern_linear(1.3); break;
      case 2: k = KernelSpec::matern_quadratic(0.9); break;
      case 3: k = KernelSpec::gaussian(1.5); break;
      case 4:
        k = KernelSpec::composite(
            KernelSpec::matern_quadratic(), KernelSpec::matern_linear(),
            parent_dom.dim() == 2
                ? DomainSpec::ball({0.2, 0.2}, 0.4)
                : DomainSpec::ball({0.2, 0.2, 0.2}, 0.4));
        break;
    }
    const int n_nodes = 3 + seed % 6;
    std::vector<int> nodes;
    for (int j = 0; j < n_nodes; ++j)
      nodes.push_back(static_cast<int>(static_cast<std::size_t>(j) *
                                       (sub.size() - 1) /
                                       static_cast<std::size_t>(n_nodes - 1)));
    const double diff = restriction_check(k, parent, sub, nodes);
    worst = std::max(worst, diff);
    if (diff == 0.0) ++exact;
  }
  out.pass = exact == instances;
  out.detail = std::to_string(exact) + "/" + std::to_string(instances) +
               " instances exactly zero, worst " + fmt(worst);
  return out;
}

// ---- criterion 5: greedy product inequality ---------------------------------

Outcome criterion_product_inequality(int seeds) {
  Outcome out;
  const TheoryReport rep = verify_theory(seeds, 1000, nullptr);
  out.pass = rep.violations == 0 && rep.checks > 0;
  out.detail = std::to_string(rep.checks) + " checks over " +
               std::to_string(rep.instances) + " instances, " +
               std::to_string(rep.violations) + " violations";
  return out;
}

// ---- criterion 6: transfer constants ----------------------------------------

constexpr double kTransferRelTol = 1e-15;

bool close_rel(double a, double b) {
  return std::fabs(a - b) <= kTransferRelTol * std::max(std::fabs(a), std::fabs(b));
}

Outcome criterion_transfers() {
  Outcome out;
  bool ok = transfer_algebraic(1.0, 1.0) == 64.0;
  double worst = 0.0;
  for (double alpha : {0.25, 0.5, 1.0, 1.7}) {
    for (double c0 : {0.3, 1.0, 2.5}) {
      for (double C0 : {0.7, 1.0, 2.0}) {
        const double a = transfer_algebraic(C0, alpha);
        const double a_ref = std::pow(2.0, 5.0 * alpha + 1.0) * C0;
        const ExponentialTransfer e = transfer_exponential(C0, c0, alpha);
        const double c1_ref = std::pow(2.0, -1.0 - 2.0 * alpha) * c0;
        const LogExponentialTransfer l = transfer_logexponential(C0, c0, alpha);
        const double ct_ref = std::pow(2.0, -2.0 - 2.0 * alpha) * c0;
        const double c_ref = std::sqrt(2.0 * C0);
        ok = ok && close_rel(a, a_ref) && close_rel(e.c1, c1_ref) &&
             close_rel(e.C, c_ref) && close_rel(l.c1_tilde, ct_ref) &&
             close_rel(l.C, c_ref);
        worst = std::max({worst, std::fabs(a - a_ref) / a_ref,
                          std::fabs(e.c1 - c1_ref) / c1_ref,
                          std::fabs(l.c1_tilde - ct_ref) / ct_ref});
      }
    }
  }
  out.pass = ok;
  out.detail = "36 parameter triples, worst relative error " + fmt(worst);
  return out;
}

// ---- criteria 7 and 8: oracle equivalence and interpolation contract --------

struct Instance {
  KernelSpec kernel = KernelSpec::matern_basic();
  std::shared_ptr<const CandidateSet> cands;
  int n_max = 0;
};

Instance make_instance(int i) {
  Instance inst;
  const bool on_ball = i % 2 == 1;
  const DomainSpec dom = on_ball ? DomainSpec::ball({0.0, 0.0}, 1.0)
                                 : DomainSpec::box({0.0, 0.0}, {1.0, 1.0});
  const std::size_t n_cand = 100 + static_cast<std::size_t>((i * 37) % 401);
  inst.cands = std::make_shared<CandidateSet>(discretize(
      dom, SamplingStrategy::Halton, n_cand, static_cast<std::uint64_t>(i)));
  switch (i % 5) {
    case 0: inst.kernel = KernelSpec::matern_basic(1.0); break;
    case 1: inst.kernel = KernelSpec::matern_linear(1.4); break;
    case 2: inst.kernel = KernelSpec::matern_quadratic(0.8); break;
    case 3: inst.kernel = KernelSpec::gaussian(1.5); break;
    case 4:
      inst.kernel = KernelSpec::composite(
          KernelSpec::matern_quadratic(), KernelSpec::matern_linear(),
          on_ball ? DomainSpec::ball({0.0, 0.0}, 0.5)
                  : DomainSpec::ball({0.4, 0.4}, 0.3));
      break;
  }
  inst.n_max = 5 + i % 26;
  return inst;
}

// The tolerance floor keeps the node gram well inside the range the dense
// oracle accepts.
constexpr double kOraclePowerTol = 1e-5;
constexpr double kOracleTol = 1e-8;

Outcome criterion_oracle(int instances) {
  Outcome out;
  double worst = 0.0;
  for (int i = 0; i < instances; ++i) {
    const Instance inst = make_instance(i);
    const GreedyTrace t = run(inst.kernel, inst.cands, SelectionRule{},
                              StopCriteria{inst.n_max, kOraclePowerTol});
    PointList nodes(inst.cands->dim());
    for (int id : t.selected_ids)
      nodes.push_back(inst.cands->point(static_cast<std::size_t>(id)));
    const std::vector<double> direct =
        power_direct(inst.kernel, nodes, inst.cands->points());
    for (std::size_t j = 0; j < direct.size(); ++j)
      worst = std::max(worst, std::fabs(t.final_state.power2[j] -
                                        direct[j] * direct[j]));
  }
  out.pass = worst <= kOracleTol;
  out.detail = std::to_string(instances) + " instances, max discrepancy " +
               fmt(worst) + " (limit " + fmt(kOracleTol) + ")";
  return out;
}

constexpr double kNodeTol = 1e-8;
constexpr double kPointwiseSlack = 1e-6;

Outcome criterion_interpolation(int instances) {
  Outcome out;
  double worst_node = 0.0, worst_excess = 0.0;
  for (int i = 0; i < instances; ++i) {
    const Instance inst = make_instance(i + 200);
    std::mt19937_64 rng(static_cast<std::uint64_t>(1000 + i));
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    std::uniform_int_distribution<std::size_t> pick(0, inst.cands->size() - 1);

    // f is a finite kernel combination, so its native norm is computable.
    const std::size_t m = 4 + static_cast<std::size_t>(i % 5);
    std::vector<std::size_t> z_ids;
    while (z_ids.size() < m) {
      const std::size_t id = pick(rng);
      bool fresh = true;
      for (std::size_t z : z_ids) fresh = fresh && z != id;
      if (fresh) z_ids.push_back(id);
    }
    PointList zs(inst.cands->dim());
    std::vector<double> c;
    for (std::size_t z : z_ids) {
      zs.push_back(inst.cands->point(z));
      c.push_back(coef(rng));
    }
    const Eigen::MatrixXd A = gram(inst.kernel, zs);
    Eigen::Map<const Eigen::VectorXd> cv(c.data(),
                                         static_cast<Eigen::Index>(c.size()));
    const double fnorm = std::sqrt(std::max(cv.dot(A * cv), 0.0));

    std::vector<double> fvals(inst.cands->size(), 0.0);
    for (std::size_t p = 0; p < inst.cands->size(); ++p)
      for (std::size_t j = 0; j < zs.size(); ++j)
        fvals[p] += c[j] * eval(inst.kernel, inst.cands->point(p), zs.point(j));

    const GreedyTrace t =
        run(inst.kernel, inst.cands, SelectionRule{},
            StopCriteria{10 + (i % 15), kOraclePowerTol});
    std::vector<double> f_sel;
    for (int id : t.selected_ids)
      f_sel.push_back(fvals[static_cast<std::size_t>(id)]);
    const std::vector<double> s =
        interpolate(t.final_state, f_sel, inst.cands->points());

    for (int id : t.selected_ids)
      worst_node = std::max(
          worst_node, std::fabs(s[static_cast<std::size_t>(id)] -
                                fvals[static_cast<std::size_t>(id)]));
    for (std::size_t p = 0; p < inst.cands->size(); ++p) {
      const double bound =
          std::sqrt(std::max(t.final_state.power2[p], 0.0)) * fnorm +
          kPointwiseSlack;
      worst_excess =
          std::max(worst_excess, std::fabs(fvals[p] - s[p]) - bound);
    }
  }
  out.pass = worst_node <= kNodeTol && worst_excess <= 0.0;
  out.detail = std::to_string(instances) + " instances, node error " +
               fmt(worst_node) + ", bound excess " + fmt(worst_excess);
  return out;
}

// ---- criterion 9: determinism ------------------------------------------------

Outcome criterion_determinism(const std::map<std::string, PresetRun>& run1,
                              const std::map<std::string, PresetRun>& run2) {
  Outcome out;
  int identical = 0, total = 0;
  std::string first_diff;
  for (const std::string& name : preset_names()) {
    const PresetRun& a = run1.at(name);
    const PresetRun& b = run2.at(name);
    if (!a.error.empty() || !b.error.empty()) {
      first_diff = name + " failed to run";
      total += 2;
      continue;
    }
    for (const char* file : {"trace_super.csv", "trace_sub.csv"}) {
      ++total;
      if (slurp(a.art.dir / file) == slurp(b.art.dir / file))
        ++identical;
      else if (first_diff.empty())
        first_diff = name + "/" + file;
    }
  }
  out.pass = identical == total;
  out.detail = std::to_string(identical) + "/" + std::to_string(total) +
               " trace files byte-identical" +
               (first_diff.empty() ? "" : ", first difference " + first_diff);
  return out;
}

}  // namespace

int main() {
  const fs::path base = fs::current_path() / "acceptance_out";
  std::error_code ec;
  fs::remove_all(base, ec);

  const auto run1 = run_presets(base / "run1");
  const auto run2 = run_presets(base / "run2");

  std::vector<std::pair<std::string, Outcome>> rows;
  auto guard = [](const std::string& label, auto&& fn) {
    try {
      return std::pair<std::string, Outcome>(label, fn());
    } catch (const std::exception& e) {
      Outcome out;
      out.detail = std::string("exception: ") + e.what();
      return std::pair<std::string, Outcome>(label, out);
    }
  };

  rows.push_back(guard("matern rates stay put on the cusp domain",
                       [&] { return criterion_rate_stability(run1); }));
  rows.push_back(guard("composite rate improves on the annulus",
                       [&] { return criterion_rate_improvement(run1); }));
  rows.push_back(guard("gaussian decay is log-exponential on both domains",
                       [&] { return criterion_gaussian_decay(run1); }));
  rows.push_back(guard("power function restricts exactly",
                       [] { return criterion_restriction(50); }));
  rows.push_back(guard("greedy product inequality holds",
                       [] { return criterion_product_inequality(200); }));
  rows.push_back(guard("transfer constants are exact",
                       [] { return criterion_transfers(); }));
  rows.push_back(guard("incremental power matches the dense oracle",
                       [] { return criterion_oracle(100); }));
  rows.push_back(guard("interpolants honor the power bound",
                       [] { return criterion_interpolation(100); }));
  rows.push_back(guard("preset traces are byte-deterministic",
                       [&] { return criterion_determinism(run1, run2); }));

  int passed = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& [label, outcome] = rows[i];
    std::cout << "[" << (i + 1) << "/" << rows.size() << "] "
              << (outcome.pass ? "PASS" : "FAIL") << " " << label << " ("
              << outcome.detail << ")\n";
    if (outcome.pass) ++passed;
  }
  std::cout << "acceptance: " << passed << "/" << rows.size()
            << " criteria passed\n";
  return passed == static_cast<int>(rows.size()) ? 0 : 1;
}
