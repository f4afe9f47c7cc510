#pragma once

#include <unordered_map>
#include <vector>

#include "dynkc/assignment.hpp"
#include "dynkc/budget_sparsifier.hpp"
#include "dynkc/clusterer.hpp"
#include "dynkc/hat_multiset.hpp"
#include "dynkc/metric.hpp"

namespace dynkc {

// Budget-bounded maintenance and recourse-bounded publication in one engine.
// Internally a BudgetSparsifier keeps the level structure fresh; the published
// multiset trails it phase by phase, exactly as in RecourseSparsifier but with
// snapshots drawn from the budget engine's flat solution, so both the work
// bound and the recourse bound hold per update.
class MergedSparsifier final : public DynamicClusterer {
 public:
  MergedSparsifier(MetricSpace& m, const Params& prm);

  void preprocess(const std::vector<UpdateEvent>& initial) override;
  void preprocess_ids(const std::vector<PointId>& ids);
  UpdateOutcome apply(const UpdateEvent& ev) override;
  std::vector<PointId> solution() const override { return hat_.support_sorted(); }
  double solution_cost() const override;

  struct PhaseRecord {
    std::uint64_t ell = 0;
    std::size_t n_at_start = 0;
    std::uint64_t updates = 0;
  };

  // introspection (tests and verification sweeps)
  const BudgetSparsifier& inner() const { return budget_; }
  const HatMultiset& hat() const { return hat_; }
  const std::vector<PointId>& target_prev() const { return target_prev_; }
  const std::vector<PointId>& target_cur() const { return target_cur_; }
  const PointSet& inserted_prev() const { return ins_prev_; }
  const PointSet& inserted_cur() const { return ins_cur_; }
  const Assignment& sigma_hat() const { return sigma_hat_; }
  int sub_phase() const { return sub_phase_; }
  std::uint64_t phase_index() const { return ell_; }
  const std::vector<PhaseRecord>& phase_records() const { return phase_records_; }

  std::vector<std::pair<PointId, bool>> take_support_delta() {
    return hat_.take_support_delta();
  }

 private:
  enum class Target { kPrev, kCur };
  void replace_in_target(PointId p, Target which);
  void lazy_sync();
  void advance_phase();
  bool at_fixpoint() const;
  void rebuild_pos_map(const std::vector<PointId>& list,
                       std::unordered_map<PointId, std::size_t>& map) const;

  MetricSpace& metric_;
  Params prm_;
  BudgetSparsifier budget_;

  HatMultiset hat_;
  std::vector<PointId> target_prev_, target_cur_;
  std::unordered_map<PointId, std::size_t> target_prev_pos_, target_cur_pos_;
  Assignment sigma_prev_, sigma_cur_, sigma_hat_;
  PointSet ins_prev_, ins_cur_;
  std::vector<PointId> del_list_;
  int sub_phase_ = 1;
  std::size_t pos_ = 0;
  std::uint64_t ell_ = 0;
  std::vector<PhaseRecord> phase_records_;
  bool updated_ = false;  // set on first apply; preprocess is barred after that
};

}  // namespace dynkc
