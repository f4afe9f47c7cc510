#pragma once

#include <random>
#include <unordered_map>
#include <vector>

#include "dynkc/assignment.hpp"
#include "dynkc/clusterer.hpp"
#include "dynkc/hat_multiset.hpp"
#include "dynkc/level.hpp"
#include "dynkc/metric.hpp"

namespace dynkc {

// Bicriteria solution with low worst-case recourse. A stack of peeling levels
// is rebuilt eagerly from the shallowest stale layer, while the published
// multiset catches up with the internal solution a bounded number of steps per
// update, phase by phase.
class RecourseSparsifier final : public DynamicClusterer {
 public:
  RecourseSparsifier(MetricSpace& m, const Params& prm);

  void preprocess(const std::vector<UpdateEvent>& initial) override;
  void preprocess_ids(const std::vector<PointId>& ids);
  UpdateOutcome apply(const UpdateEvent& ev) override;
  std::vector<PointId> solution() const override { return hat_.support_sorted(); }
  double solution_cost() const override;

  struct Level {
    PointSet U;                   // working set, live points only
    std::size_t n_at_build = 0;   // |U| when the level was built
    std::uint64_t cnt = 0;        // updates touching this level since then
    std::vector<PointId> sample;  // this level's solution layer, sorted
    double nu = 0.0;
  };

  struct PhaseRecord {
    std::uint64_t ell = 0;
    std::size_t n_at_start = 0;
    std::uint64_t updates = 0;
  };

  // introspection (tests and verification sweeps)
  const PointSet& live() const { return live_; }
  const std::vector<Level>& levels() const { return levels_; }
  const PointSet& flat_solution() const { return S_; }
  const Assignment& sigma() const { return sigma_; }
  const HatMultiset& hat() const { return hat_; }
  const std::vector<PointId>& target_prev() const { return target_prev_; }
  const std::vector<PointId>& target_cur() const { return target_cur_; }
  const PointSet& inserted_prev() const { return ins_prev_; }
  const PointSet& inserted_cur() const { return ins_cur_; }
  const Assignment& sigma_hat() const { return sigma_hat_; }
  const Assignment& sigma_prev() const { return sigma_prev_; }
  const Assignment& sigma_cur() const { return sigma_cur_; }
  int sub_phase() const { return sub_phase_; }
  std::uint64_t phase_index() const { return ell_; }
  const std::vector<PhaseRecord>& phase_records() const { return phase_records_; }
  std::uint64_t rebuild_count() const { return rebuild_serial_; }

  // Support enter/leave events accumulated since last taken (insertion order).
  std::vector<std::pair<PointId, bool>> take_support_delta() {
    return hat_.take_support_delta();
  }

 private:
  void insert_point(PointId p);
  void delete_point(PointId p);
  void check_threshold_rebuild();
  void rebuild_from_layer(std::size_t i);
  void replace_in_flat(PointId p);
  enum class Target { kPrev, kCur };
  void replace_in_target(PointId p, Target which);
  void lazy_sync();
  void advance_phase();
  bool at_fixpoint() const;
  std::vector<PointId> snapshot_solution_list() const;
  void rebuild_pos_map(const std::vector<PointId>& list,
                       std::unordered_map<PointId, std::size_t>& map) const;

  MetricSpace& metric_;
  Params prm_;

  PointSet live_;
  std::vector<Level> levels_;
  PointSet S_;        // internal solution, union of the level samples plus
                      // points inserted since the last rebuild of their range
  Assignment sigma_;  // nearest-sample assignment covering every live point

  // published state
  HatMultiset hat_;
  std::vector<PointId> target_prev_, target_cur_;  // phase snapshots, ordered
  std::unordered_map<PointId, std::size_t> target_prev_pos_, target_cur_pos_;
  Assignment sigma_prev_, sigma_cur_, sigma_hat_;
  PointSet ins_prev_, ins_cur_;
  std::vector<PointId> del_list_;
  int sub_phase_ = 1;
  std::size_t pos_ = 0;
  std::uint64_t ell_ = 0;

  std::uint64_t rebuild_serial_ = 0;
  std::vector<PhaseRecord> phase_records_;
  bool updated_ = false;  // set on first apply; preprocess is barred after that
};

}  // namespace dynkc
