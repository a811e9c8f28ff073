#include "kgreedy/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "kgreedy/experiment.hpp"
#include "kgreedy/trace_io.hpp"

namespace kgreedy {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitEarlyTermination = 3;
constexpr int kExitVerifyFailed = 4;

int cmd_run(const std::string& config_path, const std::string& preset_name,
            const std::string& out_override) {
  ExperimentConfig cfg;
  if (!preset_name.empty()) {
    cfg = preset(preset_name);
  } else {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "error: cannot open config " << config_path << "\n";
      return kExitConfig;
    }
    nlohmann::json j;
    try {
      in >> j;
    } catch (const std::exception& e) {
      std::cerr << "error: config is not valid JSON: " << e.what() << "\n";
      return kExitConfig;
    }
    cfg = config_from_json(j);
  }
  if (!out_override.empty()) cfg.outputs = out_override;

  const ExperimentArtifacts art = run_experiment(cfg);
  std::cout << "wrote " << art.dir.string() << "\n";
  std::cout << "super: " << art.points_super << " points, stop "
            << to_string(art.stop_super) << "\n";
  std::cout << "sub: " << art.points_sub << " points, stop "
            << to_string(art.stop_sub) << "\n";
  const bool early_super = art.stop_super == StopReason::NumericalRank &&
                           art.points_super < cfg.min_points;
  const bool early_sub = art.stop_sub == StopReason::NumericalRank &&
                         art.points_sub < cfg.min_points;
  if (early_super || early_sub) {
    std::cerr << "error: numerical termination before min_points="
              << cfg.min_points << "\n";
    return kExitEarlyTermination;
  }
  return kExitOk;
}

int cmd_fit(const std::string& trace_path, const std::string& model_name,
            double alpha, const std::string& window_text) {
  const TraceFile tf = read_trace_csv(trace_path);
  std::vector<int> ns;
  std::vector<double> sigmas;
  for (const TraceRow& r : tf.rows) {
    ns.push_back(r.step);
    sigmas.push_back(r.sigma);
  }
  FitWindow window = default_fit_window(static_cast<int>(ns.size()));
  if (!window_text.empty()) {
    const auto colon = window_text.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("--window expects lo:hi");
    window.lo = std::stoi(window_text.substr(0, colon));
    window.hi = std::stoi(window_text.substr(colon + 1));
  }
  const DecayModel model = decay_model_from_string(model_name);
  DecayFit fit;
  switch (model) {
    case DecayModel::Algebraic:
      fit = fit_algebraic(ns, sigmas, window);
      break;
    case DecayModel::Exponential:
      fit = fit_exponential(ns, sigmas, alpha, window);
      break;
    case DecayModel::LogExponential:
      fit = fit_logexponential(ns, sigmas, alpha, window);
      break;
  }
  std::cout << fit.to_json().dump(2) << "\n";
  return kExitOk;
}

int cmd_verify(int seeds, const std::string& report_path) {
  std::ostringstream csv;
  const TheoryReport rep = verify_theory(seeds, 1, &csv);
  std::filesystem::path out = report_path.empty()
                                  ? output_root() / "verify_report.csv"
                                  : std::filesystem::path(report_path);
  {
    std::ofstream f(out, std::ios::binary);
    if (!f) {
      std::cerr << "error: cannot write " << out.string() << "\n";
      return kExitConfig;
    }
    f << csv.str();
  }
  std::cout << "instances: " << rep.instances << ", checks: " << rep.checks
            << ", violations: " << rep.violations << "\n";
  std::cout << "report: " << out.string() << "\n";
  if (rep.violations > 0) {
    std::cerr << "error: product inequality violated\n";
    return kExitVerifyFailed;
  }
  return kExitOk;
}

int cmd_plot(const std::string& artifacts_dir) {
  const auto path = emit_plot(artifacts_dir);
  std::cout << "wrote " << path.string() << "\n";
  return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
  CLI::App app{"greedy kernel interpolation experiments"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "run an experiment");
  std::string config_path, preset_name, out_override;
  auto* copt = run_cmd->add_option("--config", config_path, "experiment config JSON");
  auto* popt = run_cmd->add_option("--preset", preset_name, "named preset");
  run_cmd->add_option("--out", out_override, "output directory name override");
  copt->excludes(popt);

  auto* fit_cmd = app.add_subcommand("fit", "fit a decay model to a trace");
  std::string trace_path, model_name, window_text;
  double alpha = 0.0;
  fit_cmd->add_option("--trace", trace_path, "trace CSV")->required();
  fit_cmd->add_option("--model", model_name,
                      "algebraic | exponential | log_exponential")
      ->required();
  fit_cmd->add_option("--alpha", alpha, "fixed exponent for exponential models");
  fit_cmd->add_option("--window", window_text, "fit window lo:hi (hi=0 is end)");

  auto* verify_cmd = app.add_subcommand("verify", "check the greedy product inequality");
  int seeds = 50;
  std::string report_path;
  verify_cmd->add_option("--seeds", seeds, "number of random instances");
  verify_cmd->add_option("--report", report_path, "report CSV path");

  auto* plot_cmd = app.add_subcommand("plot", "re-render the SVG from traces");
  std::string artifacts_dir;
  plot_cmd->add_option("--artifacts", artifacts_dir, "experiment output directory")
      ->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run_cmd->parsed()) {
      if (config_path.empty() && preset_name.empty()) {
        std::cerr << "error: run needs --config or --preset\n";
        return kExitConfig;
      }
      return cmd_run(config_path, preset_name, out_override);
    }
    if (fit_cmd->parsed()) return cmd_fit(trace_path, model_name, alpha, window_text);
    if (verify_cmd->parsed()) return cmd_verify(seeds, report_path);
    if (plot_cmd->parsed()) return cmd_plot(artifacts_dir);
  } catch (const config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    for (const auto& f : e.fields()) std::cerr << "  " << f << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitConfig;
}

}  // namespace kgreedy
