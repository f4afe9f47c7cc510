#pragma once

#include <vector>

#include "dynkc/metric.hpp"
#include "dynkc/types.hpp"

namespace dynkc {

// Small-instance reference implementations used to cross-check the dynamic
// algorithms. The exponential ones are guarded: |P| <= 18 and k <= 4.

struct OptResult {
  double cost;
  std::vector<PointId> witness;  // sorted; empty iff P is empty
};

// Exact k-center optimum by subset enumeration. Ties prefer the smaller
// witness (fewer centers, then lexicographic).
OptResult opt_kcenter(const MetricSpace& m, const std::vector<PointId>& P, int k);

// Smallest radius r such that some X (|X| <= k) has at least zeta*|U| members
// of U within r (closed ball) while fewer than zeta*|U| lie strictly inside.
// Equals the ceil(zeta*|U|)-th smallest distance to the best X. The size
// guard relaxes to 4096 points for k=1, where enumeration is linear.
double mu_quantile(const MetricSpace& m, const std::vector<PointId>& U, double zeta,
                   const std::vector<PointId>& P, int k);

struct GonzalezResult {
  std::vector<PointId> centers;
  double cost;
};

// Farthest-first traversal baseline, seeded at the smallest id, distance ties
// to the smaller id.
GonzalezResult gonzalez(const MetricSpace& m, const std::vector<PointId>& P, int k);

// Sort-based reference for the level radius: the ceil(beta*|U|)-th smallest
// distance from U to S.
double select_radius_sorted(const MetricSpace& m, const std::vector<PointId>& U,
                            const std::vector<PointId>& S, double beta);

// Snapshot of a clustering state for the replacement-sequence search. Slot
// root_slot has lost its center; center_points[root_slot] holds the old
// coordinates, which still anchor the far-member test but are not a candidate
// target.
struct SeqSearchState {
  const MetricSpace* metric = nullptr;
  double r = 0.0;
  std::vector<PointId> center_points;            // by slot
  std::vector<std::vector<PointId>> clusters;    // by slot, members only
  std::size_t root_slot = 0;
};

struct SeqSearchResult {
  bool found = false;
  // Alternating center/point path [c_1, p_1, c_2, p_2, ..., c_l, p_l] when
  // found; c_1 is the lost center, p_l the promoted endpoint.
  std::vector<PointId> sequence;
  std::vector<std::size_t> visited_slots;  // exploration order
};

// Exhaustive search over the explicit blocked-edge graph: each far member
// points at its nearest surviving center; a member whose nearest center is
// farther than r ends the sequence. Brute-force distances, no shared state
// with the incremental engine.
SeqSearchResult exhaustive_seq_search(const SeqSearchState& st);

}  // namespace dynkc
