#include "kgreedy/rates.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace kgreedy {

std::string to_string(DecayModel m) {
  switch (m) {
    case DecayModel::Algebraic: return "algebraic";
    case DecayModel::Exponential: return "exponential";
    case DecayModel::LogExponential: return "log_exponential";
  }
  return "unknown";
}

DecayModel decay_model_from_string(const std::string& s) {
  if (s == "algebraic") return DecayModel::Algebraic;
  if (s == "exponential") return DecayModel::Exponential;
  if (s == "log_exponential") return DecayModel::LogExponential;
  throw std::invalid_argument("unknown decay model: " + s);
}

nlohmann::json DecayFit::to_json() const {
  nlohmann::json j;
  j["model"] = to_string(model);
  j["C"] = C;
  j["alpha"] = alpha;
  if (model != DecayModel::Algebraic) j["c"] = c;
  j["window"] = {window_lo, window_hi};
  j["rms"] = rms_residual;
  return j;
}

namespace {

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double rms = 0.0;
};

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double xm = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xm += x[i];
    ym += y[i];
  }
  xm /= n;
  ym /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - xm) * (x[i] - xm);
    sxy += (x[i] - xm) * (y[i] - ym);
  }
  if (sxx == 0.0)
    throw std::invalid_argument("fit: degenerate abscissa in window");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = ym - f.slope * xm;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    ss += r * r;
  }
  f.rms = std::sqrt(ss / n);
  return f;
}

// Collects the (n, log sigma) pairs inside the effective window.
struct WindowedData {
  std::vector<int> ns;
  std::vector<double> log_sigma;
  int lo = 0, hi = 0;
};

WindowedData collect(std::span<const int> ns, std::span<const double> sigmas,
                     FitWindow window, int min_n) {
  if (ns.size() != sigmas.size())
    throw std::invalid_argument("fit: ns and sigmas must share their length");
  if (window.lo < 1) throw std::invalid_argument("fit: window must start at n >= 1");
  const int lo = std::max(window.lo, min_n);
  WindowedData w;
  w.lo = 0;
  w.hi = 0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const int n = ns[i];
    if (n < lo) continue;
    if (window.hi > 0 && n > window.hi) continue;
    if (!(sigmas[i] > 0.0))
      throw std::invalid_argument("fit: sigma values must be positive");
    w.ns.push_back(n);
    w.log_sigma.push_back(std::log(sigmas[i]));
    w.lo = w.lo == 0 ? n : std::min(w.lo, n);
    w.hi = std::max(w.hi, n);
  }
  if (w.ns.size() < 3)
    throw std::invalid_argument("fit: window keeps fewer than 3 points");
  return w;
}

}  // namespace

DecayFit fit_algebraic(std::span<const int> ns, std::span<const double> sigmas,
                       FitWindow window) {
  const WindowedData w = collect(ns, sigmas, window, 1);
  std::vector<double> x(w.ns.size());
  for (std::size_t i = 0; i < w.ns.size(); ++i) x[i] = std::log(static_cast<double>(w.ns[i]));
  const LinearFit f = least_squares(x, w.log_sigma);
  DecayFit out;
  out.model = DecayModel::Algebraic;
  out.C = std::exp(f.intercept);
  out.alpha = -f.slope;
  out.window_lo = w.lo;
  out.window_hi = w.hi;
  out.rms_residual = f.rms;
  return out;
}

DecayFit fit_exponential(std::span<const int> ns, std::span<const double> sigmas,
                         double alpha_fixed, FitWindow window) {
  if (!(alpha_fixed > 0.0))
    throw std::invalid_argument("fit: alpha must be positive");
  const WindowedData w = collect(ns, sigmas, window, 1);
  std::vector<double> x(w.ns.size());
  for (std::size_t i = 0; i < w.ns.size(); ++i)
    x[i] = std::pow(static_cast<double>(w.ns[i]), alpha_fixed);
  const LinearFit f = least_squares(x, w.log_sigma);
  DecayFit out;
  out.model = DecayModel::Exponential;
  out.C = std::exp(f.intercept);
  out.alpha = alpha_fixed;
  out.c = -f.slope;
  out.window_lo = w.lo;
  out.window_hi = w.hi;
  out.rms_residual = f.rms;
  return out;
}

DecayFit fit_logexponential(std::span<const int> ns, std::span<const double> sigmas,
                            double alpha_fixed, FitWindow window) {
  if (!(alpha_fixed > 0.0))
    throw std::invalid_argument("fit: alpha must be positive");
  // log(n) vanishes at n = 1; the model only separates from n >= 2.
  const WindowedData w = collect(ns, sigmas, window, 2);
  std::vector<double> x(w.ns.size());
  for (std::size_t i = 0; i < w.ns.size(); ++i) {
    const double n = static_cast<double>(w.ns[i]);
    x[i] = std::log(n) * std::pow(n, alpha_fixed);
  }
  const LinearFit f = least_squares(x, w.log_sigma);
  DecayFit out;
  out.model = DecayModel::LogExponential;
  out.C = std::exp(f.intercept);
  out.alpha = alpha_fixed;
  out.c = -f.slope;
  out.window_lo = w.lo;
  out.window_hi = w.hi;
  out.rms_residual = f.rms;
  return out;
}

FitWindow default_fit_window(int n_steps) {
  if (n_steps < 1) throw std::invalid_argument("default_fit_window: empty trace");
  const int burn = std::max(5, n_steps / 10);
  return FitWindow{burn + 1, n_steps};
}

nlohmann::json StabilityReport::to_json() const {
  nlohmann::json j;
  j["stable"] = stable;
  j["threshold"] = threshold;
  j["slack"] = slack;
  j["model"] = to_string(super_fit.model);
  j["fit_super"] = super_fit.to_json();
  j["fit_sub"] = sub_fit.to_json();
  return j;
}

StabilityReport stability_verdict(const DecayFit& super_fit,
                                  const DecayFit& sub_fit, double slack) {
  if (super_fit.model != sub_fit.model)
    throw std::invalid_argument("stability_verdict: fits use different models");
  if (!(slack >= 0.0))
    throw std::invalid_argument("stability_verdict: slack must be >= 0");
  StabilityReport rep;
  rep.slack = slack;
  rep.super_fit = super_fit;
  rep.sub_fit = sub_fit;
  switch (super_fit.model) {
    case DecayModel::Algebraic:
      rep.threshold = super_fit.alpha - slack;
      rep.stable = sub_fit.alpha >= rep.threshold;
      break;
    case DecayModel::Exponential:
      rep.threshold = std::exp2(-1.0 - 2.0 * super_fit.alpha) * super_fit.c - slack;
      rep.stable = sub_fit.c >= rep.threshold;
      break;
    case DecayModel::LogExponential:
      rep.threshold = std::exp2(-2.0 - 2.0 * super_fit.alpha) * super_fit.c - slack;
      rep.stable = sub_fit.c >= rep.threshold;
      break;
  }
  return rep;
}

}  // namespace kgreedy
