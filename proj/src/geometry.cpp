#include "kgreedy/geometry.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace kgreedy {

double euclidean_norm(PointView v) {
  double amax = 0.0;
  for (double c : v) amax = std::max(amax, std::fabs(c));
  if (amax == 0.0) return 0.0;
  double s = 0.0;
  for (double c : v) {
    const double t = c / amax;
    s += t * t;
  }
  return amax * std::sqrt(s);
}

double euclidean_distance(PointView a, PointView b) {
  assert(a.size() == b.size());
  double amax = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    amax = std::max(amax, std::fabs(a[i] - b[i]));
  if (amax == 0.0) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double t = (a[i] - b[i]) / amax;
    s += t * t;
  }
  return amax * std::sqrt(s);
}

void PointList::push_back(PointView p) {
  if (dim == 0) dim = static_cast<int>(p.size());
  if (static_cast<std::size_t>(dim) != p.size())
    throw std::invalid_argument("PointList: dimension mismatch");
  coords.insert(coords.end(), p.begin(), p.end());
}

PointList PointList::from_rows(const std::vector<std::vector<double>>& rows) {
  PointList out;
  for (const auto& r : rows) out.push_back({r.data(), r.size()});
  return out;
}

}  // namespace kgreedy
