#include "kgreedy/abstract_greedy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace kgreedy {

namespace {

constexpr double kSpanTol = 1e-12;
constexpr std::size_t kCombinationBudget = 1'000'000;

// Distance to the span of the first n columns of Q, with one
// re-orthogonalization pass against loss of orthogonality.
double dist_to_span(const Eigen::VectorXd& f, const Eigen::MatrixXd& Q, int n) {
  if (n == 0) return f.norm();
  const auto B = Q.leftCols(n);
  Eigen::VectorXd r = f - B * (B.transpose() * f);
  r -= B * (B.transpose() * r);
  return r.norm();
}

}  // namespace

void AbstractInstance::validate() const {
  if (dictionary.empty())
    throw std::invalid_argument("abstract: empty dictionary");
  const Eigen::Index m = dictionary.front().size();
  if (m < 1) throw std::invalid_argument("abstract: zero-dimensional vectors");
  for (const auto& f : dictionary) {
    if (f.size() != m)
      throw std::invalid_argument("abstract: mixed vector dimensions");
    if (f.norm() > 1.0 + 1e-12)
      throw std::invalid_argument("abstract: dictionary vector norm exceeds 1");
  }
  if (subset_ids.empty())
    throw std::invalid_argument("abstract: empty subset");
  for (int id : subset_ids)
    if (id < 0 || static_cast<std::size_t>(id) >= dictionary.size())
      throw std::invalid_argument("abstract: subset id out of range");
  if (!(gamma > 0.0) || gamma > 1.0)
    throw std::invalid_argument("abstract: gamma must lie in (0, 1]");
}

AbstractInstance AbstractInstance::random(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dim_dist(2, 8);
  std::uniform_int_distribution<int> size_dist(4, 32);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> radius(0.1, 1.0);

  AbstractInstance inst;
  const int m = dim_dist(rng);
  const int n = size_dist(rng);
  inst.dictionary.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd v(m);
    double nrm = 0.0;
    do {
      for (int j = 0; j < m; ++j) v(j) = gauss(rng);
      nrm = v.norm();
    } while (nrm < 1e-8);
    inst.dictionary.push_back(v * (radius(rng) / nrm));
  }
  std::uniform_int_distribution<int> subset_size(1, n);
  const int s = subset_size(rng);
  std::vector<int> ids(static_cast<std::size_t>(n));
  std::iota(ids.begin(), ids.end(), 0);
  std::shuffle(ids.begin(), ids.end(), rng);
  ids.resize(static_cast<std::size_t>(s));
  std::sort(ids.begin(), ids.end());
  inst.subset_ids = std::move(ids);
  return inst;
}

GreedyRunRecord abstract_run(const AbstractInstance& inst, int steps) {
  inst.validate();
  if (steps < 0 || static_cast<std::size_t>(steps) > inst.subset_ids.size())
    throw std::invalid_argument("abstract_run: steps must lie in [0, |subset|]");

  const Eigen::Index m = inst.dictionary.front().size();
  GreedyRunRecord rec;
  Eigen::MatrixXd Q(m, steps);
  int n_sel = 0;

  for (int n = 0; n <= steps; ++n) {
    double worst_full = 0.0;
    for (const auto& f : inst.dictionary)
      worst_full = std::max(worst_full, dist_to_span(f, Q, n_sel));
    // Strict > keeps the lowest subset id on ties.
    double worst_sub = -1.0;
    int sel = -1;
    for (int id : inst.subset_ids) {
      const double d = dist_to_span(inst.dictionary[static_cast<std::size_t>(id)], Q, n_sel);
      if (d > worst_sub) {
        worst_sub = d;
        sel = id;
      }
    }
    rec.sigma_full.push_back(worst_full);
    rec.sigma_tilde.push_back(worst_sub);
    if (n == steps) break;
    if (worst_sub <= kSpanTol) {
      rec.subset_exhausted = true;
      break;
    }
    const Eigen::VectorXd& f = inst.dictionary[static_cast<std::size_t>(sel)];
    Eigen::VectorXd v = f;
    if (n_sel > 0) {
      const auto B = Q.leftCols(n_sel);
      v -= B * (B.transpose() * v);
      v -= B * (B.transpose() * v);
    }
    Q.col(n_sel) = v / v.norm();
    ++n_sel;
    rec.selected_ids.push_back(sel);
  }
  rec.basis = Q.leftCols(n_sel);
  return rec;
}

namespace {

double worst_dist_to_basis(const AbstractInstance& inst, const Eigen::MatrixXd& Q,
                           int n) {
  double worst = 0.0;
  for (const auto& f : inst.dictionary)
    worst = std::max(worst, dist_to_span(f, Q, n));
  return worst;
}

// Orthonormalize the chosen dictionary elements; near-dependent ones are
// dropped, which only shrinks the span and keeps the bound valid.
int build_basis(const AbstractInstance& inst, const std::vector<int>& ids,
                Eigen::MatrixXd& Q) {
  int n = 0;
  for (int id : ids) {
    Eigen::VectorXd v = inst.dictionary[static_cast<std::size_t>(id)];
    if (n > 0) {
      const auto B = Q.leftCols(n);
      v -= B * (B.transpose() * v);
      v -= B * (B.transpose() * v);
    }
    const double nrm = v.norm();
    if (nrm <= kSpanTol) continue;
    Q.col(n) = v / nrm;
    ++n;
  }
  return n;
}

}  // namespace

double width_upper_bound(const AbstractInstance& inst, int m, WidthMode mode) {
  inst.validate();
  if (m < 1) throw std::invalid_argument("width_upper_bound: m must be >= 1");
  const int fsize = static_cast<int>(inst.dictionary.size());
  m = std::min(m, fsize);
  const Eigen::Index dim = inst.dictionary.front().size();

  if (mode == WidthMode::SubsetGreedy)
    return width_upper_bounds_greedy(inst, m)[static_cast<std::size_t>(m - 1)];

  // Exhaustive minimum over all m-element spans of dictionary vectors.
  std::size_t combos = 1;
  for (int i = 0; i < m; ++i) {
    combos = combos * static_cast<std::size_t>(fsize - i) / static_cast<std::size_t>(i + 1);
    if (combos > kCombinationBudget)
      throw std::runtime_error(
          "width_upper_bound: combination budget exceeded, use SubsetGreedy");
  }

  std::vector<int> ids(static_cast<std::size_t>(m));
  std::iota(ids.begin(), ids.end(), 0);
  Eigen::MatrixXd Q(dim, m);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    const int n = build_basis(inst, ids, Q);
    best = std::min(best, worst_dist_to_basis(inst, Q, n));
    // Next lexicographic combination.
    int i = m - 1;
    while (i >= 0 && ids[static_cast<std::size_t>(i)] == fsize - m + i) --i;
    if (i < 0) break;
    ++ids[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < m; ++j)
      ids[static_cast<std::size_t>(j)] = ids[static_cast<std::size_t>(j - 1)] + 1;
  }
  return best;
}

std::vector<double> width_upper_bounds_greedy(const AbstractInstance& inst,
                                              int m_max) {
  inst.validate();
  if (m_max < 1)
    throw std::invalid_argument("width_upper_bounds_greedy: m_max must be >= 1");
  // Greedy over the full dictionary: sigma_m of that run bounds the width.
  AbstractInstance full = inst;
  full.subset_ids.resize(inst.dictionary.size());
  std::iota(full.subset_ids.begin(), full.subset_ids.end(), 0);
  const int steps = std::min<int>(m_max, static_cast<int>(inst.dictionary.size()));
  const GreedyRunRecord rec = abstract_run(full, steps);
  std::vector<double> out(static_cast<std::size_t>(m_max));
  const std::size_t last = rec.sigma_full.size() - 1;
  for (int m = 1; m <= m_max; ++m)
    out[static_cast<std::size_t>(m - 1)] =
        rec.sigma_full[std::min(static_cast<std::size_t>(m), last)];
  return out;
}

InequalityReport check_product_inequality(const GreedyRunRecord& rec,
                                          std::span<const double> d_hat,
                                          int N, int K, int m) {
  if (N < 0 || K < 1 || m < 1 || m >= K)
    throw std::invalid_argument("check_product_inequality: need N >= 0 and 1 <= m < K");
  if (static_cast<std::size_t>(N + K) >= rec.sigma_tilde.size())
    throw std::invalid_argument("check_product_inequality: not enough sigma entries");
  if (static_cast<std::size_t>(m) > d_hat.size())
    throw std::invalid_argument("check_product_inequality: missing width bound for m");

  const double dm = d_hat[static_cast<std::size_t>(m - 1)];
  double lhs = 1.0;
  for (int i = 1; i <= K; ++i) {
    const double s = rec.sigma_tilde[static_cast<std::size_t>(N + i)];
    lhs *= s * s;
  }
  const double kd = static_cast<double>(K);
  const double md = static_cast<double>(m);
  const double s1 = rec.sigma_tilde[static_cast<std::size_t>(N + 1)];
  const double rhs = std::pow(kd / md, md) * std::pow(kd / (kd - md), kd - md) *
                     std::pow(s1, 2.0 * md) * std::pow(dm, 2.0 * (kd - md));
  InequalityReport rep;
  rep.lhs = lhs;
  rep.rhs = rhs;
  rep.holds = lhs <= rhs * (1.0 + 1e-10);
  return rep;
}

double transfer_algebraic(double C0, double alpha) {
  if (!(C0 > 0.0) || !(alpha > 0.0))
    throw std::invalid_argument("transfer_algebraic: constants must be positive");
  return std::exp2(5.0 * alpha + 1.0) * C0;
}

ExponentialTransfer transfer_exponential(double C0, double c0, double alpha) {
  if (!(C0 > 0.0) || !(c0 > 0.0) || !(alpha > 0.0))
    throw std::invalid_argument("transfer_exponential: constants must be positive");
  ExponentialTransfer t;
  t.C = std::sqrt(2.0 * C0);
  t.c1 = std::exp2(-1.0 - 2.0 * alpha) * c0;
  return t;
}

LogExponentialTransfer transfer_logexponential(double C0, double c0, double alpha) {
  if (!(C0 > 0.0) || !(c0 > 0.0) || !(alpha > 0.0))
    throw std::invalid_argument("transfer_logexponential: constants must be positive");
  LogExponentialTransfer t;
  t.C = std::sqrt(2.0 * C0);
  t.c1_tilde = std::exp2(-2.0 - 2.0 * alpha) * c0;
  return t;
}

}  // namespace kgreedy
