#pragma once

#include <span>
#include <string>

#include <json.hpp>

namespace kgreedy {

enum class DecayModel { Algebraic, Exponential, LogExponential };

std::string to_string(DecayModel m);
DecayModel decay_model_from_string(const std::string& s);

// Fitted decay of a positive sequence sigma_n:
//   Algebraic        sigma_n ~ C n^{-alpha}
//   Exponential      sigma_n ~ C e^{-c n^alpha}        (alpha held fixed)
//   LogExponential   sigma_n ~ C e^{-c log(n) n^alpha} (alpha held fixed)
// All fits are least squares in log space; rms_residual is measured there.
struct DecayFit {
  DecayModel model = DecayModel::Algebraic;
  double C = 0.0;
  double alpha = 0.0;
  double c = 0.0;  // unused for Algebraic
  int window_lo = 0;
  int window_hi = 0;
  double rms_residual = 0.0;

  nlohmann::json to_json() const;
};

// Window of step indices [lo, hi] used by a fit; hi <= 0 means "to the end
// of the data". The effective window is the intersection with the data and
// must keep at least 3 points.
struct FitWindow {
  int lo = 1;
  int hi = 0;
};

// ns are the 1-based step indices of sigmas; both spans share their length.
DecayFit fit_algebraic(std::span<const int> ns, std::span<const double> sigmas,
                       FitWindow window);
DecayFit fit_exponential(std::span<const int> ns,
                         std::span<const double> sigmas, double alpha_fixed,
                         FitWindow window);
// The log(n) factor needs n >= 2, so the effective window starts there.
DecayFit fit_logexponential(std::span<const int> ns,
                            std::span<const double> sigmas, double alpha_fixed,
                            FitWindow window);

// Discards the pre-asymptotic head: [max(5, n/10) + 1, n_steps].
FitWindow default_fit_window(int n_steps);

// Whether the sub-domain decay keeps the super-domain rate up to the
// abstract-greedy transfer constants, with `slack` absorbing fit noise:
//   Algebraic        alpha_sub >= alpha_super - slack
//   Exponential      c_sub >= 2^{-1-2 alpha} c_super - slack
//   LogExponential   c_sub >= 2^{-2-2 alpha} c_super - slack
struct StabilityReport {
  bool stable = false;
  double threshold = 0.0;
  double slack = 0.0;
  DecayFit super_fit;
  DecayFit sub_fit;

  nlohmann::json to_json() const;
};

inline constexpr double kDefaultStabilitySlack = 0.15;

StabilityReport stability_verdict(const DecayFit& super_fit,
                                  const DecayFit& sub_fit,
                                  double slack = kDefaultStabilitySlack);

}  // namespace kgreedy
