#pragma once

#include <memory>
#include <utility>
#include <variant>
#include <vector>

#include "kgreedy/geometry.hpp"

namespace kgreedy {

// Membership predicate over R^d. Immutable and cheap to copy; composite
// nodes share their children.
//
// Boundary conventions: balls are open (strict <), boxes are closed, and
// the norm cut keeps strictly ||x|| > threshold. Differences therefore keep
// the subtrahend's boundary when the subtrahend is an open ball.
class DomainSpec {
 public:
  struct BallShape {
    std::vector<double> center;
    double radius;
  };
  struct BoxShape {
    std::vector<double> low;
    std::vector<double> high;
  };
  struct DifferenceShape {
    std::shared_ptr<const DomainSpec> minuend;
    std::shared_ptr<const DomainSpec> subtrahend;
  };
  struct IntersectShape {
    std::shared_ptr<const DomainSpec> base;
    double norm_greater;
  };
  struct ExplicitShape {
    PointList points;
  };
  using Node = std::variant<BallShape, BoxShape, DifferenceShape,
                            IntersectShape, ExplicitShape>;

  static DomainSpec ball(std::vector<double> center, double radius);
  static DomainSpec box(std::vector<double> low, std::vector<double> high);
  static DomainSpec difference(DomainSpec minuend, DomainSpec subtrahend);
  // base intersected with { x : ||x||_2 > threshold }.
  static DomainSpec intersect_norm_greater(DomainSpec base, double threshold);
  static DomainSpec explicit_points(PointList points);

  int dim() const { return dim_; }
  bool contains(PointView x) const;

  // Axis-aligned box enclosing the domain, as {low, high}.
  std::pair<std::vector<double>, std::vector<double>> bounding_box() const;

  const Node& node() const { return node_; }

 private:
  DomainSpec(int dim, Node node) : dim_(dim), node_(std::move(node)) {}

  int dim_ = 0;
  Node node_;
};

}  // namespace kgreedy
