#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "kgreedy/geometry.hpp"

namespace kgreedy {

// Greedy approximation in plain R^m: a dictionary F of vectors with norm
// <= 1 and a subset F~ (by ids) the greedy selects from, while errors are
// tracked over both F~ and the full F.
struct AbstractInstance {
  std::vector<Eigen::VectorXd> dictionary;
  std::vector<int> subset_ids;
  double gamma = 1.0;

  // Vectors drawn on the unit sphere and scaled into [0.1, 1]; dimension
  // in 2..8, dictionary size in 4..32, subset a nonempty random subset.
  static AbstractInstance random(std::uint64_t seed);

  void validate() const;
};

struct GreedyRunRecord {
  std::vector<int> selected_ids;
  // sigma[n] is the worst distance to the span of the first n selections;
  // entry 0 is the worst raw norm. Runs stop early once the selected
  // element is within 1e-12 of the current span.
  std::vector<double> sigma_tilde;  // over the subset
  std::vector<double> sigma_full;   // over the whole dictionary
  Eigen::MatrixXd basis;            // orthonormal, one column per selection
  bool subset_exhausted = false;
};

GreedyRunRecord abstract_run(const AbstractInstance& inst, int steps);

enum class WidthMode {
  SubsetExhaustive,  // all m-element subsets; combinatorial budget capped
  SubsetGreedy       // span of m greedy selections from the full dictionary
};

// Upper bound on the m-width of the dictionary: the worst distance to the
// best (or greedily chosen) span of m dictionary elements.
double width_upper_bound(const AbstractInstance& inst, int m, WidthMode mode);

// d_hat[m-1] for m = 1..m_max from a single greedy sweep.
std::vector<double> width_upper_bounds_greedy(const AbstractInstance& inst,
                                              int m_max);

struct InequalityReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

// prod_{i=1..K} sigma~_{N+i}^2 <= (K/m)^m (K/(K-m))^{K-m}
//                                  * sigma~_{N+1}^{2m} * d_hat_m^{2K-2m}
// d_hat[m-1] must hold an upper bound on the m-width. `holds` allows a
// 1e-10 relative margin for roundoff.
InequalityReport check_product_inequality(const GreedyRunRecord& rec,
                                          std::span<const double> d_hat,
                                          int N, int K, int m);

// Rate transfer constants: width decay C0 n^{-alpha} gives greedy decay
// C1 n^{-alpha} with C1 = 2^{5 alpha + 1} C0.
double transfer_algebraic(double C0, double alpha);

// Width decay C0 e^{-c0 n^alpha} gives greedy decay C e^{-c1 n^alpha}.
struct ExponentialTransfer {
  double C = 0.0;
  double c1 = 0.0;
};
ExponentialTransfer transfer_exponential(double C0, double c0, double alpha);

// Width decay C0 e^{-c0 log(n) n^alpha} gives greedy decay
// C e^{-c1~ log(n) n^alpha}, valid from n >= 2.
struct LogExponentialTransfer {
  double C = 0.0;
  double c1_tilde = 0.0;
};
LogExponentialTransfer transfer_logexponential(double C0, double c0,
                                               double alpha);

}  // namespace kgreedy
