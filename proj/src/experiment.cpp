#include "kgreedy/experiment.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include "kgreedy/abstract_greedy.hpp"
#include "kgreedy/trace_io.hpp"

namespace kgreedy {

namespace {

using nlohmann::json;

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("short write on " + path.string());
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

SelectionRule build_rule(const ExperimentConfig& cfg, const CandidateSet& cands) {
  SelectionRule rule;
  rule.kind = cfg.rule.kind;
  rule.gamma = cfg.rule.gamma;
  rule.weak_seed = cfg.rule.weak_seed;
  if (rule.kind != SelectionRuleKind::PGreedy)
    rule.target = evaluate_target_function(cfg.rule.target_function, cands.points());
  return rule;
}

struct FitOutcome {
  std::string which;  // "super" or "sub"
  DecayFit fit;
};

DecayFit run_fit(const FitRequest& req, const GreedyTrace& trace) {
  std::vector<int> ns;
  std::vector<double> sigmas;
  for (const TraceEntry& e : trace.entries) {
    ns.push_back(e.step);
    sigmas.push_back(e.sigma);
  }
  FitWindow window = req.window
                         ? *req.window
                         : default_fit_window(static_cast<int>(ns.size()));
  switch (req.model) {
    case DecayModel::Algebraic:
      return fit_algebraic(ns, sigmas, window);
    case DecayModel::Exponential:
      return fit_exponential(ns, sigmas, req.alpha_fixed, window);
    case DecayModel::LogExponential:
      return fit_logexponential(ns, sigmas, req.alpha_fixed, window);
  }
  throw std::logic_error("run_fit: unknown model");
}

}  // namespace

std::filesystem::path output_root() {
  if (const char* env = std::getenv(kOutputRootEnv); env && *env)
    return std::filesystem::path(env);
  return std::filesystem::current_path();
}

ExperimentArtifacts run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();

  ExperimentArtifacts art;
  art.dir = output_root() / cfg.outputs;
  std::filesystem::create_directories(art.dir);
  art.manifest = art.dir / "manifest.json";
  art.trace_super = art.dir / "trace_super.csv";
  art.trace_sub = art.dir / "trace_sub.csv";
  art.selected_super = art.dir / "selected_super.csv";
  art.selected_sub = art.dir / "selected_sub.csv";
  art.plot = art.dir / "plot.svg";

  // Written before any heavy work so an interrupted run leaves a marker.
  json manifest;
  manifest["schema_version"] = 1;
  manifest["name"] = cfg.name;
  manifest["config_hash"] = config_hash(cfg);
  manifest["config"] = config_to_json(cfg);
  manifest["status"] = "running";
  manifest["files"] = json::array();
  write_json_file(art.manifest, manifest);

  const auto super_set = std::make_shared<CandidateSet>(
      discretize(cfg.domain_super, cfg.sampling, cfg.discretization_target, cfg.seed));
  const auto sub_set =
      std::make_shared<CandidateSet>(restrict_to(*super_set, cfg.domain_sub));

  std::vector<std::string> files;
  auto emit = [&](const std::filesystem::path& p, const std::string& text) {
    write_text_file(p, text);
    files.push_back(p.filename().string());
  };

  const GreedyTrace trace_super =
      run(cfg.kernel, super_set, build_rule(cfg, *super_set), cfg.stop);
  {
    std::ostringstream os;
    write_trace_csv(os, trace_super);
    emit(art.trace_super, os.str());
  }
  {
    std::ostringstream os;
    CandidateSet sel(cfg.domain_super, trace_super.selected_points,
                     std::vector<std::int64_t>(trace_super.selected_ids.begin(),
                                               trace_super.selected_ids.end()));
    sel.write_csv(os);
    emit(art.selected_super, os.str());
  }
  if (cfg.power_snapshot) {
    std::ostringstream os;
    write_power_csv(os, trace_super.final_state);
    emit(art.dir / "power_super.csv", os.str());
  }

  const GreedyTrace trace_sub =
      run(cfg.kernel, sub_set, build_rule(cfg, *sub_set), cfg.stop);
  {
    std::ostringstream os;
    write_trace_csv(os, trace_sub);
    emit(art.trace_sub, os.str());
  }
  {
    std::ostringstream os;
    CandidateSet sel(cfg.domain_sub, trace_sub.selected_points,
                     trace_sub.selected_parent_ids);
    sel.write_csv(os);
    emit(art.selected_sub, os.str());
  }
  if (cfg.power_snapshot) {
    std::ostringstream os;
    write_power_csv(os, trace_sub.final_state);
    emit(art.dir / "power_sub.csv", os.str());
  }

  art.stop_super = trace_super.stop;
  art.stop_sub = trace_sub.stop;
  art.points_super = static_cast<int>(trace_super.selected_ids.size());
  art.points_sub = static_cast<int>(trace_sub.selected_ids.size());

  // Fits first, then one stability verdict per model that fitted both runs.
  std::vector<FitOutcome> outcomes;
  const std::pair<const char*, const GreedyTrace*> runs[] = {
      {"super", &trace_super}, {"sub", &trace_sub}};
  for (const FitRequest& req : cfg.fits) {
    for (const auto& [which, trace] : runs) {
      const DecayFit fit = run_fit(req, *trace);
      const auto path = art.dir / ("fit_" + std::string(which) + "_" +
                                   to_string(req.model) + ".json");
      write_json_file(path, fit.to_json());
      files.push_back(path.filename().string());
      art.fit_files.push_back(path);
      outcomes.push_back(FitOutcome{which, fit});
    }
  }
  for (const FitRequest& req : cfg.fits) {
    const DecayFit* super_fit = nullptr;
    const DecayFit* sub_fit = nullptr;
    for (const FitOutcome& o : outcomes) {
      if (o.fit.model != req.model) continue;
      if (o.which == "super") super_fit = &o.fit;
      if (o.which == "sub") sub_fit = &o.fit;
    }
    if (super_fit && sub_fit) {
      const StabilityReport rep =
          stability_verdict(*super_fit, *sub_fit, cfg.stability_slack);
      const auto path = art.dir / ("verdict_" + to_string(req.model) + ".json");
      write_json_file(path, rep.to_json());
      files.push_back(path.filename().string());
      art.verdict_files.push_back(path);
    }
  }

  emit_plot(art.dir);
  files.push_back(art.plot.filename().string());

  const auto t1 = std::chrono::steady_clock::now();
  manifest["status"] = "complete";
  manifest["files"] = files;
  manifest["points_super"] = art.points_super;
  manifest["points_sub"] = art.points_sub;
  manifest["stop_super"] = to_string(art.stop_super);
  manifest["stop_sub"] = to_string(art.stop_sub);
  manifest["candidates_super"] = super_set->size();
  manifest["candidates_sub"] = sub_set->size();
  manifest["wall_seconds"] = std::chrono::duration<double>(t1 - t0).count();
  write_json_file(art.manifest, manifest);
  return art;
}

TheoryReport verify_theory(int seed_count, std::uint64_t seed_base,
                           std::ostream* report_csv) {
  if (seed_count < 1)
    throw std::invalid_argument("verify_theory: seed_count must be >= 1");
  if (report_csv) (*report_csv) << "instance_seed,N,K,m,lhs,rhs,holds\n";
  TheoryReport rep;
  for (int s = 0; s < seed_count; ++s) {
    const std::uint64_t seed = seed_base + static_cast<std::uint64_t>(s);
    const AbstractInstance inst = AbstractInstance::random(seed);
    const int steps = static_cast<int>(inst.subset_ids.size());
    const GreedyRunRecord rec = abstract_run(inst, steps);
    const int avail = static_cast<int>(rec.sigma_tilde.size()) - 1;
    const int m_max = 5;
    const std::vector<double> d_hat = width_upper_bounds_greedy(inst, m_max);
    ++rep.instances;
    for (int K = 2; K <= 6; ++K) {
      for (int N = 0; N + K <= avail; ++N) {
        for (int m = 1; m < K; ++m) {
          const InequalityReport r = check_product_inequality(rec, d_hat, N, K, m);
          ++rep.checks;
          if (!r.holds) ++rep.violations;
          if (report_csv)
            (*report_csv) << seed << ',' << N << ',' << K << ',' << m << ','
                          << fmt17(r.lhs) << ',' << fmt17(r.rhs) << ','
                          << (r.holds ? 1 : 0) << '\n';
        }
      }
    }
  }
  return rep;
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig cfg;
  cfg.name = name;
  cfg.outputs = name;
  cfg.sampling = SamplingStrategy::Grid;
  cfg.seed = 0;
  cfg.stop = StopCriteria{500, 0.0};
  cfg.fits = {FitRequest{DecayModel::Algebraic, 0.0, std::nullopt}};

  const DomainSpec unit_box = DomainSpec::box({0.0, 0.0}, {1.0, 1.0});
  const DomainSpec cusp_sub = DomainSpec::intersect_norm_greater(unit_box, 1.0);

  // Rate fits use the second half of the run: the early steps carry a
  // pre-asymptotic transient that biases the fitted exponent upward.
  if (name == "fig1_composite") {
    cfg.kernel = KernelSpec::composite(KernelSpec::matern_quadratic(),
                                       KernelSpec::matern_linear(),
                                       DomainSpec::ball({0.0, 0.0}, 0.5));
    cfg.domain_super = DomainSpec::ball({0.0, 0.0}, 1.0);
    cfg.domain_sub = DomainSpec::difference(DomainSpec::ball({0.0, 0.0}, 1.0),
                                            DomainSpec::ball({0.0, 0.0}, 0.5));
    // The annulus rate settles slowly; 500 steps is still transient.
    cfg.stop = StopCriteria{1000, 0.0};
    cfg.discretization_target = 40000;
    cfg.fits = {FitRequest{DecayModel::Algebraic, 0.0, FitWindow{500, 0}}};
    return cfg;
  }
  if (name == "fig2_basic_matern" || name == "fig2_linear_matern") {
    cfg.kernel = name == "fig2_basic_matern" ? KernelSpec::matern_basic()
                                             : KernelSpec::matern_linear();
    cfg.domain_super = unit_box;
    cfg.domain_sub = cusp_sub;
    // Large enough that the restricted set still exceeds 10^4 candidates.
    cfg.discretization_target = 50000;
    cfg.fits = {FitRequest{DecayModel::Algebraic, 0.0, FitWindow{250, 0}}};
    return cfg;
  }
  if (name == "fig3_gaussian") {
    cfg.kernel = KernelSpec::gaussian(2.0);
    cfg.domain_super = unit_box;
    cfg.domain_sub = cusp_sub;
    cfg.discretization_target = 50000;
    cfg.fits = {FitRequest{DecayModel::LogExponential, 0.5, FitWindow{5, 0}},
                FitRequest{DecayModel::Algebraic, 0.0, FitWindow{5, 0}}};
    return cfg;
  }
  throw std::invalid_argument("unknown preset: " + name);
}

std::vector<std::string> preset_names() {
  return {"fig1_composite", "fig2_basic_matern", "fig2_linear_matern",
          "fig3_gaussian"};
}

}  // namespace kgreedy
