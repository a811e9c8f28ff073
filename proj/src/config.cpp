#include "kgreedy/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <string>

namespace kgreedy {

namespace {

using nlohmann::json;

// Collects every problem instead of stopping at the first one.
struct Validator {
  std::vector<std::string> errors;

  void fail(const std::string& where, const std::string& what) {
    errors.push_back(where + ": " + what);
  }

  void check_keys(const json& j, const std::string& where,
                  const std::set<std::string>& required,
                  const std::set<std::string>& optional) {
    if (!j.is_object()) {
      fail(where, "expected an object");
      return;
    }
    for (const auto& item : j.items()) {
      if (!required.count(item.key()) && !optional.count(item.key()))
        fail(where + "." + item.key(), "unknown field");
    }
    for (const auto& key : required)
      if (!j.contains(key)) fail(where + "." + key, "missing field");
  }

  double number(const json& j, const std::string& where, double fallback) {
    if (!j.is_number()) {
      fail(where, "expected a number");
      return fallback;
    }
    return j.get<double>();
  }

  std::string text(const json& j, const std::string& where) {
    if (!j.is_string()) {
      fail(where, "expected a string");
      return {};
    }
    return j.get<std::string>();
  }

  std::vector<double> vec(const json& j, const std::string& where) {
    std::vector<double> out;
    if (!j.is_array() || j.empty()) {
      fail(where, "expected a non-empty array of numbers");
      return out;
    }
    for (const auto& v : j) {
      if (!v.is_number()) {
        fail(where, "expected a non-empty array of numbers");
        return {};
      }
      out.push_back(v.get<double>());
    }
    return out;
  }
};

DomainSpec parse_domain(const json& j, const std::string& where, Validator& v);

DomainSpec fallback_domain() { return DomainSpec::box({0.0}, {1.0}); }

DomainSpec parse_domain(const json& j, const std::string& where, Validator& v) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    v.fail(where, "expected a domain object with a type");
    return fallback_domain();
  }
  const std::string type = j["type"].get<std::string>();
  try {
    if (type == "ball") {
      v.check_keys(j, where, {"type", "center", "radius"}, {});
      if (!j.contains("center") || !j.contains("radius"))
        return fallback_domain();
      return DomainSpec::ball(v.vec(j["center"], where + ".center"),
                              v.number(j["radius"], where + ".radius", 1.0));
    }
    if (type == "box") {
      v.check_keys(j, where, {"type", "low", "high"}, {});
      if (!j.contains("low") || !j.contains("high")) return fallback_domain();
      return DomainSpec::box(v.vec(j["low"], where + ".low"),
                             v.vec(j["high"], where + ".high"));
    }
    if (type == "difference") {
      v.check_keys(j, where, {"type", "minuend", "subtrahend"}, {});
      if (!j.contains("minuend") || !j.contains("subtrahend"))
        return fallback_domain();
      return DomainSpec::difference(
          parse_domain(j["minuend"], where + ".minuend", v),
          parse_domain(j["subtrahend"], where + ".subtrahend", v));
    }
    if (type == "intersection") {
      v.check_keys(j, where, {"type", "base", "norm_greater"}, {});
      if (!j.contains("base") || !j.contains("norm_greater"))
        return fallback_domain();
      return DomainSpec::intersect_norm_greater(
          parse_domain(j["base"], where + ".base", v),
          v.number(j["norm_greater"], where + ".norm_greater", 0.0));
    }
    if (type == "explicit") {
      v.check_keys(j, where, {"type", "points"}, {});
      if (!j.contains("points") || !j["points"].is_array() || j["points"].empty()) {
        v.fail(where + ".points", "expected a non-empty array of points");
        return fallback_domain();
      }
      PointList pts;
      for (const auto& row : j["points"]) {
        const std::vector<double> coords = v.vec(row, where + ".points");
        if (coords.empty()) return fallback_domain();
        pts.push_back({coords.data(), coords.size()});
      }
      return DomainSpec::explicit_points(std::move(pts));
    }
  } catch (const std::exception& e) {
    v.fail(where, e.what());
    return fallback_domain();
  }
  v.fail(where + ".type", "unknown domain type: " + type);
  return fallback_domain();
}

KernelSpec parse_kernel(const json& j, const std::string& where, Validator& v) {
  const KernelSpec fallback = KernelSpec::matern_basic();
  if (!j.is_object() || !j.contains("family") || !j["family"].is_string()) {
    v.fail(where, "expected a kernel object with a family");
    return fallback;
  }
  const std::string family = j["family"].get<std::string>();
  try {
    if (family == "composite") {
      v.check_keys(j, where, {"family", "outer", "inner", "indicator"}, {});
      if (!j.contains("outer") || !j.contains("inner") || !j.contains("indicator"))
        return fallback;
      return KernelSpec::composite(
          parse_kernel(j["outer"], where + ".outer", v),
          parse_kernel(j["inner"], where + ".inner", v),
          parse_domain(j["indicator"], where + ".indicator", v));
    }
    double shape = 1.0;
    if (family == "matern_linear") {
      v.check_keys(j, where, {"family"}, {"shape", "variant"});
      MaternLinearVariant variant = MaternLinearVariant::OnePlusR;
      if (j.contains("variant")) {
        const std::string s = v.text(j["variant"], where + ".variant");
        if (s == "one_plus_r")
          variant = MaternLinearVariant::OnePlusR;
        else if (s == "one_minus_r")
          variant = MaternLinearVariant::OneMinusR;
        else
          v.fail(where + ".variant", "unknown variant: " + s);
      }
      if (j.contains("shape")) shape = v.number(j["shape"], where + ".shape", 1.0);
      return KernelSpec::matern_linear(shape, variant);
    }
    v.check_keys(j, where, {"family"}, {"shape"});
    if (j.contains("shape")) shape = v.number(j["shape"], where + ".shape", 1.0);
    if (family == "matern_basic") return KernelSpec::matern_basic(shape);
    if (family == "matern_quadratic") return KernelSpec::matern_quadratic(shape);
    if (family == "gaussian") return KernelSpec::gaussian(shape);
  } catch (const std::exception& e) {
    v.fail(where, e.what());
    return fallback;
  }
  v.fail(where + ".family", "unknown kernel family: " + family);
  return fallback;
}

}  // namespace

nlohmann::json domain_to_json(const DomainSpec& d) {
  using S = DomainSpec;
  return std::visit(
      [&](const auto& node) -> json {
        using T = std::decay_t<decltype(node)>;
        json j;
        if constexpr (std::is_same_v<T, S::BallShape>) {
          j["type"] = "ball";
          j["center"] = node.center;
          j["radius"] = node.radius;
        } else if constexpr (std::is_same_v<T, S::BoxShape>) {
          j["type"] = "box";
          j["low"] = node.low;
          j["high"] = node.high;
        } else if constexpr (std::is_same_v<T, S::DifferenceShape>) {
          j["type"] = "difference";
          j["minuend"] = domain_to_json(*node.minuend);
          j["subtrahend"] = domain_to_json(*node.subtrahend);
        } else if constexpr (std::is_same_v<T, S::IntersectShape>) {
          j["type"] = "intersection";
          j["base"] = domain_to_json(*node.base);
          j["norm_greater"] = node.norm_greater;
        } else {
          j["type"] = "explicit";
          json pts = json::array();
          for (std::size_t i = 0; i < node.points.size(); ++i) {
            const PointView p = node.points.point(i);
            pts.push_back(std::vector<double>(p.begin(), p.end()));
          }
          j["points"] = std::move(pts);
        }
        return j;
      },
      d.node());
}

DomainSpec domain_from_json(const nlohmann::json& j) {
  Validator v;
  DomainSpec d = parse_domain(j, "domain", v);
  if (!v.errors.empty())
    throw config_error("invalid domain", std::move(v.errors));
  return d;
}

nlohmann::json kernel_to_json(const KernelSpec& k) {
  json j;
  switch (k.family()) {
    case KernelFamily::MaternBasic:
      j["family"] = "matern_basic";
      j["shape"] = k.shape();
      break;
    case KernelFamily::MaternLinear:
      j["family"] = "matern_linear";
      j["shape"] = k.shape();
      j["variant"] = k.linear_variant() == MaternLinearVariant::OnePlusR
                         ? "one_plus_r"
                         : "one_minus_r";
      break;
    case KernelFamily::MaternQuadratic:
      j["family"] = "matern_quadratic";
      j["shape"] = k.shape();
      break;
    case KernelFamily::Gaussian:
      j["family"] = "gaussian";
      j["shape"] = k.shape();
      break;
    case KernelFamily::Composite:
      j["family"] = "composite";
      j["outer"] = kernel_to_json(k.outer());
      j["inner"] = kernel_to_json(k.inner());
      j["indicator"] = domain_to_json(k.indicator());
      break;
  }
  return j;
}

KernelSpec kernel_from_json(const nlohmann::json& j) {
  Validator v;
  KernelSpec k = parse_kernel(j, "kernel", v);
  if (!v.errors.empty())
    throw config_error("invalid kernel", std::move(v.errors));
  return k;
}

namespace {

const std::set<std::string> kConfigRequired = {
    "schema_version", "name", "kernel", "domain_super", "domain_sub"};
const std::set<std::string> kConfigOptional = {
    "sampling",       "discretization_target", "seed",  "rule",
    "stop",           "min_points",            "fits",  "stability_slack",
    "power_snapshot", "outputs"};

bool name_is_safe(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9') || c == '_' || c == '-';
  });
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& j) {
  Validator v;
  ExperimentConfig cfg;
  v.check_keys(j, "config", kConfigRequired, kConfigOptional);
  if (!v.errors.empty() && !j.is_object())
    throw config_error("invalid config", std::move(v.errors));

  if (j.contains("schema_version")) {
    if (!j["schema_version"].is_number_integer() || j["schema_version"] != 1)
      v.fail("config.schema_version", "unsupported schema version");
  }
  if (j.contains("name")) {
    cfg.name = v.text(j["name"], "config.name");
    if (!name_is_safe(cfg.name))
      v.fail("config.name", "must match [A-Za-z0-9_-]+");
  }
  if (j.contains("kernel")) cfg.kernel = parse_kernel(j["kernel"], "config.kernel", v);
  if (j.contains("domain_super"))
    cfg.domain_super = parse_domain(j["domain_super"], "config.domain_super", v);
  if (j.contains("domain_sub"))
    cfg.domain_sub = parse_domain(j["domain_sub"], "config.domain_sub", v);

  if (j.contains("sampling")) {
    const std::string s = v.text(j["sampling"], "config.sampling");
    if (s == "grid")
      cfg.sampling = SamplingStrategy::Grid;
    else if (s == "halton")
      cfg.sampling = SamplingStrategy::Halton;
    else
      v.fail("config.sampling", "expected grid or halton");
  }
  if (j.contains("discretization_target")) {
    if (!j["discretization_target"].is_number_unsigned() ||
        j["discretization_target"].get<std::uint64_t>() == 0)
      v.fail("config.discretization_target", "expected a positive integer");
    else
      cfg.discretization_target = j["discretization_target"].get<std::size_t>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned())
      v.fail("config.seed", "expected a non-negative integer");
    else
      cfg.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("rule")) {
    const json& r = j["rule"];
    v.check_keys(r, "config.rule", {"kind"}, {"gamma", "weak_seed", "target_function"});
    if (r.is_object() && r.contains("kind")) {
      const std::string kind = v.text(r["kind"], "config.rule.kind");
      if (kind == "p_greedy")
        cfg.rule.kind = SelectionRuleKind::PGreedy;
      else if (kind == "f_greedy")
        cfg.rule.kind = SelectionRuleKind::FGreedy;
      else if (kind == "f_over_p_greedy")
        cfg.rule.kind = SelectionRuleKind::FOverPGreedy;
      else
        v.fail("config.rule.kind", "unknown rule kind: " + kind);
      if (r.contains("gamma")) {
        cfg.rule.gamma = v.number(r["gamma"], "config.rule.gamma", 1.0);
        if (!(cfg.rule.gamma > 0.0) || cfg.rule.gamma > 1.0)
          v.fail("config.rule.gamma", "must lie in (0, 1]");
      }
      if (r.contains("weak_seed")) {
        if (!r["weak_seed"].is_number_unsigned())
          v.fail("config.rule.weak_seed", "expected a non-negative integer");
        else
          cfg.rule.weak_seed = r["weak_seed"].get<std::uint64_t>();
      }
      if (r.contains("target_function"))
        cfg.rule.target_function = v.text(r["target_function"], "config.rule.target_function");
      if (cfg.rule.kind != SelectionRuleKind::PGreedy && cfg.rule.target_function.empty())
        v.fail("config.rule.target_function", "required for residual rules");
      if (cfg.rule.kind == SelectionRuleKind::PGreedy && !cfg.rule.target_function.empty())
        v.fail("config.rule.target_function", "meaningless for p_greedy");
    }
  }
  if (j.contains("stop")) {
    const json& s = j["stop"];
    v.check_keys(s, "config.stop", {"max_points"}, {"power_tol"});
    if (s.is_object() && s.contains("max_points")) {
      if (!s["max_points"].is_number_integer() || s["max_points"].get<int>() < 1)
        v.fail("config.stop.max_points", "expected a positive integer");
      else
        cfg.stop.max_points = s["max_points"].get<int>();
      if (s.contains("power_tol")) {
        cfg.stop.power_tol = v.number(s["power_tol"], "config.stop.power_tol", 0.0);
        if (cfg.stop.power_tol < 0.0)
          v.fail("config.stop.power_tol", "must be >= 0");
      }
    }
  }
  if (j.contains("min_points")) {
    if (!j["min_points"].is_number_integer() || j["min_points"].get<int>() < 0)
      v.fail("config.min_points", "expected a non-negative integer");
    else
      cfg.min_points = j["min_points"].get<int>();
  }
  if (j.contains("fits")) {
    if (!j["fits"].is_array()) {
      v.fail("config.fits", "expected an array");
    } else {
      for (std::size_t i = 0; i < j["fits"].size(); ++i) {
        const json& f = j["fits"][i];
        const std::string where = "config.fits[" + std::to_string(i) + "]";
        v.check_keys(f, where, {"model"}, {"alpha", "window"});
        FitRequest req;
        if (f.is_object() && f.contains("model")) {
          try {
            req.model = decay_model_from_string(v.text(f["model"], where + ".model"));
          } catch (const std::exception& e) {
            v.fail(where + ".model", e.what());
          }
        }
        if (f.contains("alpha")) {
          req.alpha_fixed = v.number(f["alpha"], where + ".alpha", 0.0);
          if (!(req.alpha_fixed > 0.0)) v.fail(where + ".alpha", "must be positive");
        } else if (req.model != DecayModel::Algebraic) {
          v.fail(where + ".alpha", "required for exponential models");
        }
        if (f.contains("window")) {
          const json& w = f["window"];
          if (!w.is_array() || w.size() != 2 || !w[0].is_number_integer() ||
              !w[1].is_number_integer()) {
            v.fail(where + ".window", "expected [lo, hi]");
          } else {
            FitWindow fw{w[0].get<int>(), w[1].get<int>()};
            if (fw.lo < 1) v.fail(where + ".window", "lo must be >= 1");
            req.window = fw;
          }
        }
        cfg.fits.push_back(req);
      }
    }
  }
  if (j.contains("stability_slack")) {
    cfg.stability_slack = v.number(j["stability_slack"], "config.stability_slack",
                                   kDefaultStabilitySlack);
    if (cfg.stability_slack < 0.0)
      v.fail("config.stability_slack", "must be >= 0");
  }
  if (j.contains("power_snapshot")) {
    if (!j["power_snapshot"].is_boolean())
      v.fail("config.power_snapshot", "expected a boolean");
    else
      cfg.power_snapshot = j["power_snapshot"].get<bool>();
  }
  if (j.contains("outputs")) {
    cfg.outputs = v.text(j["outputs"], "config.outputs");
    if (!name_is_safe(cfg.outputs))
      v.fail("config.outputs", "must match [A-Za-z0-9_-]+");
  }
  if (cfg.outputs.empty()) cfg.outputs = cfg.name;

  if (cfg.domain_super.dim() != cfg.domain_sub.dim())
    v.fail("config.domain_sub", "dimension differs from domain_super");

  if (!v.errors.empty())
    throw config_error("invalid config", std::move(v.errors));
  cfg.validate();
  return cfg;
}

void ExperimentConfig::validate() const {
  std::vector<std::string> errors;
  if (!name_is_safe(name)) errors.push_back("config.name: must match [A-Za-z0-9_-]+");
  if (!name_is_safe(outputs))
    errors.push_back("config.outputs: must match [A-Za-z0-9_-]+");
  if (domain_super.dim() != domain_sub.dim())
    errors.push_back("config.domain_sub: dimension differs from domain_super");
  if (discretization_target == 0)
    errors.push_back("config.discretization_target: must be >= 1");
  if (stop.max_points < 1)
    errors.push_back("config.stop.max_points: must be >= 1");
  if (rule.kind != SelectionRuleKind::PGreedy && rule.target_function.empty())
    errors.push_back("config.rule.target_function: required for residual rules");
  for (const FitRequest& f : fits)
    if (f.model != DecayModel::Algebraic && !(f.alpha_fixed > 0.0))
      errors.push_back("config.fits: alpha required for exponential models");
  if (!errors.empty()) throw config_error("invalid config", std::move(errors));
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["schema_version"] = cfg.schema_version;
  j["name"] = cfg.name;
  j["kernel"] = kernel_to_json(cfg.kernel);
  j["domain_super"] = domain_to_json(cfg.domain_super);
  j["domain_sub"] = domain_to_json(cfg.domain_sub);
  j["sampling"] = cfg.sampling == SamplingStrategy::Grid ? "grid" : "halton";
  j["discretization_target"] = cfg.discretization_target;
  j["seed"] = cfg.seed;
  json rule;
  switch (cfg.rule.kind) {
    case SelectionRuleKind::PGreedy: rule["kind"] = "p_greedy"; break;
    case SelectionRuleKind::FGreedy: rule["kind"] = "f_greedy"; break;
    case SelectionRuleKind::FOverPGreedy: rule["kind"] = "f_over_p_greedy"; break;
  }
  rule["gamma"] = cfg.rule.gamma;
  rule["weak_seed"] = cfg.rule.weak_seed;
  if (!cfg.rule.target_function.empty())
    rule["target_function"] = cfg.rule.target_function;
  j["rule"] = std::move(rule);
  j["stop"] = {{"max_points", cfg.stop.max_points}, {"power_tol", cfg.stop.power_tol}};
  j["min_points"] = cfg.min_points;
  json fits = json::array();
  for (const FitRequest& f : cfg.fits) {
    json fj;
    fj["model"] = to_string(f.model);
    if (f.model != DecayModel::Algebraic) fj["alpha"] = f.alpha_fixed;
    if (f.window) fj["window"] = {f.window->lo, f.window->hi};
    fits.push_back(std::move(fj));
  }
  j["fits"] = std::move(fits);
  j["stability_slack"] = cfg.stability_slack;
  j["power_snapshot"] = cfg.power_snapshot;
  j["outputs"] = cfg.outputs;
  return j;
}

std::string config_hash(const ExperimentConfig& cfg) {
  // nlohmann objects iterate in key order, so dump() is already canonical.
  const std::string dump = config_to_json(cfg).dump();
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<double> evaluate_target_function(const std::string& name,
                                             const PointList& pts) {
  std::vector<double> out(pts.size());
  if (name == "franke") {
    if (pts.dim != 2)
      throw std::invalid_argument("target franke: needs 2d points");
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double x = pts.point(i)[0], y = pts.point(i)[1];
      out[i] = 0.75 * std::exp(-((9 * x - 2) * (9 * x - 2) + (9 * y - 2) * (9 * y - 2)) / 4.0) +
               0.75 * std::exp(-((9 * x + 1) * (9 * x + 1)) / 49.0 - (9 * y + 1) / 10.0) +
               0.5 * std::exp(-((9 * x - 7) * (9 * x - 7) + (9 * y - 3) * (9 * y - 3)) / 4.0) -
               0.2 * std::exp(-((9 * x - 4) * (9 * x - 4) + (9 * y - 7) * (9 * y - 7)));
    }
    return out;
  }
  if (name == "gaussian_bump") {
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double r = euclidean_norm(pts.point(i));
      out[i] = std::exp(-4.0 * r * r);
    }
    return out;
  }
  if (name == "coordinate_sum") {
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double s = 0.0;
      for (double c : pts.point(i)) s += c;
      out[i] = s;
    }
    return out;
  }
  throw std::invalid_argument("unknown target function: " + name);
}

}  // namespace kgreedy
