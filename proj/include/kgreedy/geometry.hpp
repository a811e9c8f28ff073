#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace kgreedy {

using PointView = std::span<const double>;

// Euclidean norm with max-scaling, so very large or very small coordinates
// do not overflow/underflow the intermediate squares.
double euclidean_norm(PointView v);

// Euclidean distance between two points of equal dimension.
double euclidean_distance(PointView a, PointView b);

// Flat row-major list of d-dimensional points.
struct PointList {
  int dim = 0;
  std::vector<double> coords;

  PointList() = default;
  explicit PointList(int d) : dim(d) {}

  std::size_t size() const {
    return dim == 0 ? 0 : coords.size() / static_cast<std::size_t>(dim);
  }
  bool empty() const { return coords.empty(); }

  PointView point(std::size_t i) const {
    return {coords.data() + i * static_cast<std::size_t>(dim),
            static_cast<std::size_t>(dim)};
  }

  void push_back(PointView p);

  static PointList from_rows(const std::vector<std::vector<double>>& rows);
};

}  // namespace kgreedy
