#include "kgreedy/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace kgreedy {

DomainSpec DomainSpec::ball(std::vector<double> center, double radius) {
  if (center.empty()) throw std::invalid_argument("ball: empty center");
  if (!(radius > 0.0)) throw std::invalid_argument("ball: radius must be positive");
  const int d = static_cast<int>(center.size());
  return DomainSpec(d, BallShape{std::move(center), radius});
}

DomainSpec DomainSpec::box(std::vector<double> low, std::vector<double> high) {
  if (low.empty() || low.size() != high.size())
    throw std::invalid_argument("box: low/high dimension mismatch");
  for (std::size_t i = 0; i < low.size(); ++i)
    if (!(low[i] < high[i]))
      throw std::invalid_argument("box: low must be strictly below high");
  const int d = static_cast<int>(low.size());
  return DomainSpec(d, BoxShape{std::move(low), std::move(high)});
}

DomainSpec DomainSpec::difference(DomainSpec minuend, DomainSpec subtrahend) {
  if (minuend.dim() != subtrahend.dim())
    throw std::invalid_argument("difference: dimension mismatch");
  const int d = minuend.dim();
  return DomainSpec(
      d, DifferenceShape{std::make_shared<DomainSpec>(std::move(minuend)),
                         std::make_shared<DomainSpec>(std::move(subtrahend))});
}

DomainSpec DomainSpec::intersect_norm_greater(DomainSpec base, double threshold) {
  if (!(threshold >= 0.0))
    throw std::invalid_argument("intersect_norm_greater: negative threshold");
  const int d = base.dim();
  return DomainSpec(d, IntersectShape{
                           std::make_shared<DomainSpec>(std::move(base)),
                           threshold});
}

DomainSpec DomainSpec::explicit_points(PointList points) {
  if (points.size() == 0)
    throw std::invalid_argument("explicit_points: empty point list");
  const int d = points.dim;
  return DomainSpec(d, ExplicitShape{std::move(points)});
}

bool DomainSpec::contains(PointView x) const {
  if (static_cast<int>(x.size()) != dim_)
    throw std::invalid_argument("contains: dimension mismatch");
  return std::visit(
      [&](const auto& node) -> bool {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, BallShape>) {
          double dist = euclidean_distance(x, {node.center.data(), node.center.size()});
          return dist < node.radius;
        } else if constexpr (std::is_same_v<T, BoxShape>) {
          for (std::size_t i = 0; i < x.size(); ++i)
            if (x[i] < node.low[i] || x[i] > node.high[i]) return false;
          return true;
        } else if constexpr (std::is_same_v<T, DifferenceShape>) {
          return node.minuend->contains(x) && !node.subtrahend->contains(x);
        } else if constexpr (std::is_same_v<T, IntersectShape>) {
          return node.base->contains(x) && euclidean_norm(x) > node.norm_greater;
        } else {
          const PointList& pts = node.points;
          for (std::size_t i = 0; i < pts.size(); ++i) {
            PointView p = pts.point(i);
            bool eq = true;
            for (std::size_t j = 0; j < x.size(); ++j)
              if (x[j] != p[j]) { eq = false; break; }
            if (eq) return true;
          }
          return false;
        }
      },
      node_);
}

std::pair<std::vector<double>, std::vector<double>> DomainSpec::bounding_box() const {
  return std::visit(
      [&](const auto& node)
          -> std::pair<std::vector<double>, std::vector<double>> {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, BallShape>) {
          std::vector<double> low(node.center), high(node.center);
          for (int i = 0; i < dim_; ++i) {
            low[i] -= node.radius;
            high[i] += node.radius;
          }
          return {low, high};
        } else if constexpr (std::is_same_v<T, BoxShape>) {
          return {node.low, node.high};
        } else if constexpr (std::is_same_v<T, DifferenceShape>) {
          // Removing points cannot grow the minuend's box.
          return node.minuend->bounding_box();
        } else if constexpr (std::is_same_v<T, IntersectShape>) {
          return node.base->bounding_box();
        } else {
          std::vector<double> low(dim_, std::numeric_limits<double>::infinity());
          std::vector<double> high(dim_, -std::numeric_limits<double>::infinity());
          const PointList& pts = node.points;
          for (std::size_t i = 0; i < pts.size(); ++i) {
            PointView p = pts.point(i);
            for (int j = 0; j < dim_; ++j) {
              low[j] = std::min(low[j], p[j]);
              high[j] = std::max(high[j], p[j]);
            }
          }
          return {low, high};
        }
      },
      node_);
}

}  // namespace kgreedy
