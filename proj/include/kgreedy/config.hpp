#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgreedy/candidate_set.hpp"
#include "kgreedy/domain.hpp"
#include "kgreedy/greedy.hpp"
#include "kgreedy/kernel.hpp"
#include "kgreedy/rates.hpp"

namespace kgreedy {

// Raised on malformed configs; `fields` lists every offending location.
class config_error : public std::runtime_error {
 public:
  config_error(const std::string& what, std::vector<std::string> fields)
      : std::runtime_error(what), fields_(std::move(fields)) {}
  const std::vector<std::string>& fields() const { return fields_; }

 private:
  std::vector<std::string> fields_;
};

nlohmann::json domain_to_json(const DomainSpec& d);
DomainSpec domain_from_json(const nlohmann::json& j);

nlohmann::json kernel_to_json(const KernelSpec& k);
KernelSpec kernel_from_json(const nlohmann::json& j);

// One fit request from a config; the window is clamped to the trace.
struct FitRequest {
  DecayModel model = DecayModel::Algebraic;
  double alpha_fixed = 0.0;  // required for the exponential models
  std::optional<FitWindow> window;
};

// Residual-rule targets are named functions evaluated at the candidates:
// "franke" (2d), "gaussian_bump", "coordinate_sum".
struct RuleConfig {
  SelectionRuleKind kind = SelectionRuleKind::PGreedy;
  double gamma = 1.0;
  std::uint64_t weak_seed = 0;
  std::string target_function;  // empty for PGreedy
};

struct ExperimentConfig {
  int schema_version = 1;
  std::string name;
  KernelSpec kernel = KernelSpec::matern_basic();
  DomainSpec domain_super = DomainSpec::box({0.0, 0.0}, {1.0, 1.0});
  DomainSpec domain_sub =
      DomainSpec::intersect_norm_greater(DomainSpec::box({0.0, 0.0}, {1.0, 1.0}), 1.0);
  SamplingStrategy sampling = SamplingStrategy::Grid;
  std::size_t discretization_target = 10000;
  std::uint64_t seed = 0;
  RuleConfig rule;
  StopCriteria stop{500, 0.0};
  int min_points = 0;  // fewer selections than this is a reportable failure
  std::vector<FitRequest> fits;
  double stability_slack = kDefaultStabilitySlack;
  bool power_snapshot = false;
  std::string outputs;  // directory name under the output root

  void validate() const;  // throws config_error
};

// Strict parse: unknown fields anywhere are rejected, all errors collected
// into one config_error.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

// FNV-1a 64-bit over the canonical (sorted-key) dump, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

// Named target functions for residual rules.
std::vector<double> evaluate_target_function(const std::string& name,
                                             const PointList& pts);

}  // namespace kgreedy
