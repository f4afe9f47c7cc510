#pragma once

#include <vector>

#include "dynkc/clusterer.hpp"
#include "dynkc/kcenter.hpp"
#include "dynkc/merged_sparsifier.hpp"
#include "dynkc/metric.hpp"
#include "dynkc/types.hpp"

namespace dynkc {

// End-to-end maintainer: a merged sparsifier condenses the point set into a
// small published support, and an exact-size engine runs on that support
// alone. Each adversarial update is applied to the sparsifier first; whatever
// entered or left the published support is then replayed into the inner
// engine, deletions before insertions, both in ascending id order. The
// reported solution is the inner engine's center set.
class CombinedClusterer final : public DynamicClusterer {
 public:
  CombinedClusterer(MetricSpace& metric, const Params& prm);

  void preprocess(const std::vector<UpdateEvent>& initial) override;
  void preprocess_ids(const std::vector<PointId>& ids);
  UpdateOutcome apply(const UpdateEvent& ev) override;
  std::vector<PointId> solution() const override;
  double solution_cost() const override;

  const MergedSparsifier& sparsifier() const { return merged_; }
  const DynamicKCenter& refiner() const { return kcenter_; }

 private:
  MetricSpace& metric_;
  MergedSparsifier merged_;
  DynamicKCenter kcenter_;
};

}  // namespace dynkc
