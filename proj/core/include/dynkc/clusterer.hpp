#pragma once

#include <vector>

#include "dynkc/stream.hpp"
#include "dynkc/types.hpp"

namespace dynkc {

struct UpdateOutcome {
  std::size_t n = 0;              // live points after the update
  std::size_t solution_size = 0;  // support size of the maintained solution
  // Solution change caused by this update: count-wise symmetric difference for
  // multiset solutions, half the symmetric difference for plain sets.
  double recourse = 0.0;
  std::uint64_t work_units = 0;  // distance evaluations spent on this update
};

// Common face of the dynamic clusterers. The caller owns the MetricSpace and
// registers points there first: add_point before an insertion is applied,
// remove_point after a deletion is applied (coordinates outlive deletion, so
// snapshots taken by the algorithms stay valid).
class DynamicClusterer {
 public:
  virtual ~DynamicClusterer() = default;

  // Builds the initial state from a batch of already-registered points.
  virtual void preprocess(const std::vector<UpdateEvent>& initial) = 0;

  virtual UpdateOutcome apply(const UpdateEvent& ev) = 0;

  // Current solution support, sorted ascending.
  virtual std::vector<PointId> solution() const = 0;

  // max over live points of the distance to the solution; full scan.
  virtual double solution_cost() const = 0;
};

}  // namespace dynkc
