#include "kgreedy/candidate_set.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "kgreedy/trace_io.hpp"

namespace kgreedy {

namespace {

// Exact duplicate detection via lexicographic sort of point indices.
void check_distinct(const PointList& pts) {
  const std::size_t n = pts.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const int d = pts.dim;
  auto less = [&](std::size_t a, std::size_t b) {
    PointView pa = pts.point(a), pb = pts.point(b);
    for (int i = 0; i < d; ++i) {
      if (pa[i] < pb[i]) return true;
      if (pa[i] > pb[i]) return false;
    }
    return false;
  };
  std::sort(order.begin(), order.end(), less);
  for (std::size_t i = 1; i < n; ++i) {
    PointView pa = pts.point(order[i - 1]), pb = pts.point(order[i]);
    bool eq = true;
    for (int j = 0; j < d; ++j)
      if (pa[j] != pb[j]) { eq = false; break; }
    if (eq) throw std::invalid_argument("CandidateSet: duplicate points");
  }
}

constexpr unsigned kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19,
                                23, 29, 31, 37, 41, 43, 47, 53};

double radical_inverse(std::uint64_t i, unsigned base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

}  // namespace

CandidateSet::CandidateSet(DomainSpec domain, PointList points,
                           std::vector<std::int64_t> parent_ids)
    : domain_(std::move(domain)),
      points_(std::move(points)),
      parent_ids_(std::move(parent_ids)) {
  if (points_.size() == 0)
    throw std::invalid_argument("CandidateSet: empty point set");
  if (points_.dim != domain_.dim())
    throw std::invalid_argument("CandidateSet: domain dimension mismatch");
  if (!parent_ids_.empty() && parent_ids_.size() != points_.size())
    throw std::invalid_argument("CandidateSet: parent_ids length mismatch");
  check_distinct(points_);
}

std::int64_t CandidateSet::parent_id(std::size_t id) const {
  if (parent_ids_.empty()) return -1;
  return parent_ids_.at(id);
}

double CandidateSet::min_separation() const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = i + 1; j < size(); ++j)
      best = std::min(best, euclidean_distance(point(i), point(j)));
  return best;
}

void CandidateSet::write_csv(std::ostream& os) const {
  os << "id";
  for (int j = 0; j < dim(); ++j) os << ",x" << j;
  os << ",parent_id\n";
  for (std::size_t i = 0; i < size(); ++i) {
    os << i;
    PointView p = point(i);
    for (int j = 0; j < dim(); ++j) os << ',' << fmt17(p[j]);
    os << ',' << parent_id(i) << '\n';
  }
}

namespace {

CandidateSet discretize_grid(const DomainSpec& domain, std::size_t target) {
  const int d = domain.dim();
  auto [low, high] = domain.bounding_box();
  // Smallest per-axis resolution whose filtered count reaches the target.
  // m = 1 places the box midpoint, m >= 2 includes the box endpoints.
  constexpr std::size_t kMaxLattice = 200'000'000;
  for (std::size_t m = 1;; ++m) {
    std::size_t lattice = 1;
    bool overflow = false;
    for (int i = 0; i < d; ++i) {
      if (lattice > kMaxLattice / m) { overflow = true; break; }
      lattice *= m;
    }
    if (overflow || lattice > kMaxLattice)
      throw std::runtime_error(
          "discretize: grid target unreachable within the lattice budget");

    PointList accepted(d);
    std::vector<std::size_t> idx(d, 0);
    std::vector<double> pt(d);
    while (true) {
      for (int i = 0; i < d; ++i) {
        if (m == 1)
          pt[i] = low[i] + 0.5 * (high[i] - low[i]);
        else
          pt[i] = low[i] + (high[i] - low[i]) *
                               (static_cast<double>(idx[i]) /
                                static_cast<double>(m - 1));
      }
      if (domain.contains({pt.data(), pt.size()}))
        accepted.push_back({pt.data(), pt.size()});
      int axis = d - 1;
      while (axis >= 0 && ++idx[axis] == m) idx[axis--] = 0;
      if (axis < 0) break;
    }
    if (accepted.size() >= target)
      return CandidateSet(domain, std::move(accepted));
  }
}

CandidateSet discretize_halton(const DomainSpec& domain, std::size_t target,
                               std::uint64_t seed) {
  const int d = domain.dim();
  if (d > static_cast<int>(std::size(kPrimes)))
    throw std::invalid_argument("discretize: Halton supports dim <= 16");
  auto [low, high] = domain.bounding_box();
  PointList accepted(d);
  std::vector<double> pt(d);
  const std::uint64_t max_draws =
      std::max<std::uint64_t>(1'000'000, 10'000 * static_cast<std::uint64_t>(target));
  std::uint64_t index = 1 + seed;
  for (std::uint64_t draws = 0; accepted.size() < target; ++draws, ++index) {
    if (draws >= max_draws)
      throw std::runtime_error(
          "discretize: domain discretization empty or acceptance too low");
    for (int i = 0; i < d; ++i)
      pt[i] = low[i] + (high[i] - low[i]) * radical_inverse(index, kPrimes[i]);
    if (domain.contains({pt.data(), pt.size()}))
      accepted.push_back({pt.data(), pt.size()});
  }
  return CandidateSet(domain, std::move(accepted));
}

}  // namespace

CandidateSet discretize(const DomainSpec& domain, SamplingStrategy strategy,
                        std::size_t target, std::uint64_t seed) {
  if (target == 0) throw std::invalid_argument("discretize: target must be >= 1");
  switch (strategy) {
    case SamplingStrategy::Grid:
      return discretize_grid(domain, target);
    case SamplingStrategy::Halton:
      return discretize_halton(domain, target, seed);
  }
  throw std::invalid_argument("discretize: unknown strategy");
}

CandidateSet restrict_to(const CandidateSet& parent, const DomainSpec& sub) {
  if (sub.dim() != parent.dim())
    throw std::invalid_argument("restrict_to: dimension mismatch");
  PointList pts(parent.dim());
  std::vector<std::int64_t> parent_ids;
  for (std::size_t i = 0; i < parent.size(); ++i) {
    if (sub.contains(parent.point(i))) {
      pts.push_back(parent.point(i));
      parent_ids.push_back(static_cast<std::int64_t>(i));
    }
  }
  if (pts.size() == 0)
    throw std::runtime_error("restrict_to: empty restriction");
  return CandidateSet(sub, std::move(pts), std::move(parent_ids));
}

}  // namespace kgreedy
