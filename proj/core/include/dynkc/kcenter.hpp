#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dynkc/clusterer.hpp"
#include "dynkc/indexed_heap.hpp"
#include "dynkc/metric.hpp"
#include "dynkc/oracles.hpp"
#include "dynkc/types.hpp"

namespace dynkc {

// Role of a cluster in the exact-size maintainer. Regular clusters promise
// that every member sits within the maintained radius of the center; extended
// clusters absorbed another cluster and may hold farther members; zombie
// clusters lost their original center (or inherited one through a shift) and
// promise nothing about their radius.
enum class ClusterLabel { kRegular, kExtended, kZombie };

// Result of the blocked-edge walk that looks for a replacement sequence after
// a center loss. Mirrors exhaustive_seq_search but exposes the side structures
// the engine needs to reassign points when no sequence exists.
struct SeqGraphResult {
  bool found = false;
  // Alternating [c_1, p_1, c_2, p_2, ...]; ends with the promoted point when
  // found.
  std::vector<PointId> sequence;
  std::vector<std::size_t> sequence_slots;  // slots of c_1..c_l when found
  std::vector<std::size_t> visited_slots;   // exploration order
  std::vector<std::vector<PointId>> explore;               // by slot
  std::unordered_map<PointId, std::size_t> blocked_slot;   // far member -> target slot
};

// Walks the far members of the root cluster depth first: each far member asks
// for its nearest surviving center; one farther than r ends the sequence,
// otherwise the walk recurses into that center's cluster. Distances come
// through the two callables so the engine can serve them from its heaps while
// tests can serve them by brute force; semantics (ascending-id member order,
// smaller-center-id ties inside nearest_surviving) must match
// exhaustive_seq_search.
SeqGraphResult find_sequence_graph(
    const SeqSearchState& st,
    const std::function<double(PointId, std::size_t)>& dist_to_slot_center,
    const std::function<std::optional<std::pair<double, std::size_t>>(PointId)>& nearest_surviving);

// Maintains at most k true centers under insertions and deletions with at most
// one center swap per update. The radius estimate moves on a geometric ladder
// r0*(1+delta)^level; every live point keeps an indexed heap over the current
// centers (and one over the non-zombie centers), so everything except center
// additions and the initial heap of a new point is distance-evaluation free.
class DynamicKCenter final : public DynamicClusterer {
 public:
  struct Slot {
    PointId center = 0;  // tombstone id while a repair is pending
    ClusterLabel label = ClusterLabel::kRegular;
    PointSet members;  // excludes the center
  };

  DynamicKCenter(MetricSpace& metric, const Params& prm);

  void preprocess(const std::vector<UpdateEvent>& initial) override;
  void preprocess_ids(const std::vector<PointId>& ids);
  UpdateOutcome apply(const UpdateEvent& ev) override;
  std::vector<PointId> solution() const override;
  double solution_cost() const override;

  const std::vector<Slot>& slots() const { return slots_; }
  const PointSet& live() const { return live_; }
  double radius() const;
  int level() const { return level_; }
  double base_radius() const { return r0_; }
  // Slot holding p as a member; empty for centers and unknown ids.
  std::optional<std::size_t> member_slot(PointId p) const;

  // The ladder never drops below this exponent, so a batch of coincident
  // points cannot drive the radius into denormal territory.
  static constexpr int kLevelFloor = -64;

 private:
  void insert_point(PointId p);
  void delete_point(PointId p);

  double pow_radius(int level) const;
  int level_for(double need) const;
  bool slot_center_live(std::size_t s) const;
  std::vector<PointId> center_ids() const;

  void attach(PointId p, std::size_t s);
  void detach(PointId p);
  void heap_add_center(PointId c, bool nonzombie);
  void heap_drop_center(PointId c);
  void set_label(std::size_t s, ClusterLabel lab);
  void reassign_all_nearest();
  void decreasing();
  std::optional<std::pair<std::size_t, std::size_t>> close_pair() const;
  void absorb(std::size_t i, std::size_t j);
  // C-style repair of a slot whose center departed: promote a far orphan,
  // shift a replacement sequence into place, or dissolve the cluster.
  // root_dist gives members' distances to the departed center when it is no
  // longer in the heaps; pass nullptr when tombstone is still a live center.
  void repair_slot(std::size_t s, PointId tombstone,
                   const std::unordered_map<PointId, double>* root_dist);
  void erase_slot(std::size_t s);

  MetricSpace& metric_;
  Params prm_;
  std::vector<Slot> slots_;
  std::unordered_map<PointId, std::size_t> member_slot_;
  std::unordered_map<PointId, std::size_t> center_slot_;
  std::unordered_map<PointId, IndexedMinHeap> heap_all_;
  std::unordered_map<PointId, IndexedMinHeap> heap_nz_;
  PointSet live_;
  double r0_ = 1.0;
  int level_ = 0;
  bool updated_ = false;
};

}  // namespace dynkc
