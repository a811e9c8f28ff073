#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "kgreedy/domain.hpp"
#include "kgreedy/geometry.hpp"

namespace kgreedy {

enum class SamplingStrategy { Grid, Halton };

// Finite discretization of a domain. Ids are the point positions 0..N-1.
// Points are pairwise distinct; a set obtained via restrict_to keeps the
// mapping into its parent set.
class CandidateSet {
 public:
  CandidateSet(DomainSpec domain, PointList points,
               std::vector<std::int64_t> parent_ids = {});

  std::size_t size() const { return points_.size(); }
  int dim() const { return points_.dim; }
  PointView point(std::size_t id) const { return points_.point(id); }
  const PointList& points() const { return points_; }
  const DomainSpec& domain() const { return domain_; }

  bool has_parent_ids() const { return !parent_ids_.empty(); }
  std::int64_t parent_id(std::size_t id) const;
  const std::vector<std::int64_t>& parent_ids() const { return parent_ids_; }

  // Smallest pairwise distance; O(N^2), intended for test-scale sets.
  double min_separation() const;

  // Header id,x0,...,x{d-1},parent_id; parent_id is -1 for root sets.
  void write_csv(std::ostream& os) const;

 private:
  DomainSpec domain_;
  PointList points_;
  std::vector<std::int64_t> parent_ids_;
};

// Grid: smallest per-axis resolution of the bounding box whose filtered
// point count reaches `target`; all filtered points are returned, so the
// result may exceed `target`. Halton: scrambleless Halton sequence mapped
// into the bounding box, filtered by membership, until exactly `target`
// points are accepted; `seed` offsets the start index.
CandidateSet discretize(const DomainSpec& domain, SamplingStrategy strategy,
                        std::size_t target, std::uint64_t seed);

// Keeps exactly the points of `parent` inside `sub`, coordinates copied
// bitwise, with parent_ids mapping back into `parent`.
CandidateSet restrict_to(const CandidateSet& parent, const DomainSpec& sub);

}  // namespace kgreedy
