#pragma once

#include <random>
#include <utility>
#include <vector>

#include "dynkc/metric.hpp"
#include "dynkc/types.hpp"

namespace dynkc {

// One peeling level: sample a pivot set, pick the smallest radius whose closed
// ball around the sample holds a beta fraction of the working set, and assign
// the ball members to their nearest pivot.

// Independent sampling with probability min(alpha*k*log2(n)/|U|, 1). An empty
// draw is retried up to 64 times, then one uniform member is taken.
std::vector<PointId> sample_independent(const MetricSpace& m, const std::vector<PointId>& U,
                                        const Params& prm, std::size_t n_global,
                                        std::mt19937_64& rng);

// ceil(c_trials*log2(n)) rounds of uniform 2k-subsets (the whole of U when
// |U| < 2k); keeps the round with the smallest radius, ties to the earliest.
std::vector<PointId> sample_repeated_2k(const MetricSpace& m, const std::vector<PointId>& U,
                                        const Params& prm, std::size_t n_global,
                                        std::mt19937_64& rng);

// The ceil(beta*|U|)-th smallest distance from U to S, by linear-time
// selection.
double select_radius(const MetricSpace& m, const std::vector<PointId>& U,
                     const std::vector<PointId>& S, double beta);

struct LevelBuild {
  std::vector<PointId> sample;  // sorted
  double nu = 0.0;
  // Closed-ball members with their nearest sample point, ascending by member.
  std::vector<std::pair<PointId, PointId>> ball_assign;
};

LevelBuild build_level(const MetricSpace& m, const std::vector<PointId>& U, const Params& prm,
                       std::size_t n_global, std::mt19937_64& rng);

}  // namespace dynkc
