#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "dynkc/assignment.hpp"
#include "dynkc/clusterer.hpp"
#include "dynkc/hat_multiset.hpp"
#include "dynkc/metric.hpp"

namespace dynkc {

// Bicriteria solution with a hard per-update work budget. Background builders
// recompute level suffixes a bounded number of distance evaluations at a time;
// whenever the shallowest builder finishes, its suffix replaces the published
// one wholesale. The top level holds every point no ball has claimed yet, each
// acting as its own center, so the structure stays a partition at all times.
class BudgetSparsifier final : public DynamicClusterer {
 public:
  BudgetSparsifier(MetricSpace& m, const Params& prm);

  void preprocess(const std::vector<UpdateEvent>& initial) override;
  void preprocess_ids(const std::vector<PointId>& ids);
  UpdateOutcome apply(const UpdateEvent& ev) override;
  std::vector<PointId> solution() const override { return published_.support_sorted(); }
  double solution_cost() const override;

  struct GlobalLevel {
    std::vector<PointId> sample;  // sorted, kept live under deletions
    double nu = 0.0;
  };

  struct BuilderStatus {
    std::size_t slot = 0;
    std::uint64_t generation = 0;
    std::size_t levels_done = 0;
    bool finished = false;
  };

  // introspection (tests and verification sweeps)
  const PointSet& live() const { return live_; }
  const std::vector<GlobalLevel>& levels() const { return levels_; }
  std::size_t top_index() const { return top_; }
  const PointSet& top_set() const { return terminal_lazy_; }
  std::optional<std::size_t> home_of(PointId p) const {
    auto it = home_.find(p);
    if (it == home_.end()) return std::nullopt;
    return it->second;
  }
  const Assignment& sigma() const { return sigma_; }
  std::vector<BuilderStatus> builder_status() const;
  std::uint64_t adoption_count() const { return adoption_count_; }

  // Flat solution in structure order: level samples ascending, then the top
  // set in id order. Entries are pairwise distinct.
  std::vector<PointId> solution_list() const;

 private:
  struct CompletedLevel {
    std::vector<PointId> sample;  // sorted, kept live
    double nu = 0.0;
    Assignment sigma;  // ball members to their nearest sample point, live only
    PointSet lazy;     // this level's working set, maintained under updates
  };

  struct LevelBuilder {
    std::size_t slot = 0;
    std::uint64_t generation = 0;
    std::vector<CompletedLevel> done;
    PointSet lazy_pending;  // working set of the level being built next
    bool finished = false;
    PointSet lazy_terminal;  // maintained leftover once finished

    enum class Stage { kStart, kDist, kSelect, kComplete };
    Stage stage = Stage::kStart;
    std::vector<PointId> frozen;  // level input, fixed at stage start
    std::size_t n_snap = 0;
    std::vector<PointId> sample;  // drawn, sorted; members may die mid-build
    std::size_t rank = 0;
    std::vector<double> d;        // per frozen index
    std::vector<PointId> amin;    // per frozen index
    std::size_t cursor = 0;
    std::vector<double> sel;      // quickselect working copy
    std::size_t sel_lo = 0, sel_hi = 0, sel_target = 0;
    double nu = 0.0;
    std::size_t level_counter = 0;
  };

  void insert_point(PointId p);
  void delete_point(PointId p);
  void step_builder(LevelBuilder& b, std::uint64_t budget);
  void complete_level(LevelBuilder& b);
  void adopt(std::size_t slot);
  void start_builder(std::size_t slot, const PointSet& input);
  void replace_center(std::vector<PointId>& sample, Assignment& sig, PointId p);
  void sync_published();

  MetricSpace& metric_;
  Params prm_;

  PointSet live_;
  std::vector<GlobalLevel> levels_;  // proper levels [0, top_)
  std::size_t top_ = 0;
  PointSet terminal_lazy_;  // top level: every member is its own center
  std::unordered_map<PointId, std::size_t> home_;
  Assignment sigma_;

  std::map<std::size_t, LevelBuilder> builders_;
  std::uint64_t gen_counter_ = 0;
  std::uint64_t adoption_count_ = 0;

  HatMultiset published_;
  bool updated_ = false;  // set on first apply; preprocess is barred after that
};

}  // namespace dynkc
