#include "dynkc/kcenter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dynkc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

SeqGraphResult find_sequence_graph(
    const SeqSearchState& st,
    const std::function<double(PointId, std::size_t)>& dist_to_slot_center,
    const std::function<std::optional<std::pair<double, std::size_t>>(PointId)>& nearest_surviving) {
  const std::size_t nslots = st.center_points.size();
  DYNKC_CHECK(st.clusters.size() == nslots, "seq state shape mismatch");
  DYNKC_CHECK(st.root_slot < nslots, "seq root out of range");
  SeqGraphResult out;
  out.explore.resize(nslots);

  struct Frame {
    std::size_t slot;
    std::vector<PointId> members;
    std::size_t next;
    std::size_t base;  // path length before this frame pushed its center
  };
  std::vector<char> visited(nslots, 0);
  std::vector<Frame> stack;
  std::vector<PointId> path;

  auto open = [&](std::size_t slot) {
    visited[slot] = 1;
    out.visited_slots.push_back(slot);
    Frame f{slot, st.clusters[slot], 0, path.size()};
    std::sort(f.members.begin(), f.members.end());
    path.push_back(st.center_points[slot]);
    stack.push_back(std::move(f));
  };
  open(st.root_slot);

  while (!stack.empty()) {
    Frame& f = stack.back();
    bool descended = false;
    while (f.next < f.members.size()) {
      PointId p = f.members[f.next++];
      if (dist_to_slot_center(p, f.slot) <= st.r) continue;
      out.explore[f.slot].push_back(p);
      auto near = nearest_surviving(p);
      if (!near.has_value() || near->first > st.r) {
        path.push_back(p);
        out.sequence = path;
        out.found = true;
        for (const Frame& fr : stack) out.sequence_slots.push_back(fr.slot);
        return out;
      }
      out.blocked_slot[p] = near->second;
      if (!visited[near->second]) {
        path.push_back(p);
        open(near->second);
        descended = true;
        break;
      }
    }
    if (!descended) {
      path.resize(stack.back().base);
      stack.pop_back();
      if (!stack.empty()) path.pop_back();  // the member edge the parent pushed
    }
  }
  return out;
}

DynamicKCenter::DynamicKCenter(MetricSpace& metric, const Params& prm)
    : metric_(metric), prm_(prm) {
  prm_.validate();
}

double DynamicKCenter::pow_radius(int level) const {
  return r0_ * std::pow(1.0 + prm_.delta, level);
}

double DynamicKCenter::radius() const { return pow_radius(level_); }

int DynamicKCenter::level_for(double need) const {
  if (!(need > 0.0)) return kLevelFloor;
  int j = static_cast<int>(std::ceil(std::log(need / r0_) / std::log1p(prm_.delta)));
  while (pow_radius(j) < need) ++j;
  while (j > kLevelFloor && pow_radius(j - 1) >= need) --j;
  return j < kLevelFloor ? kLevelFloor : j;
}

bool DynamicKCenter::slot_center_live(std::size_t s) const {
  auto it = center_slot_.find(slots_[s].center);
  return it != center_slot_.end() && it->second == s;
}

std::vector<PointId> DynamicKCenter::center_ids() const {
  std::vector<PointId> out;
  out.reserve(slots_.size());
  for (std::size_t s = 0; s < slots_.size(); ++s)
    if (slot_center_live(s)) out.push_back(slots_[s].center);
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<std::size_t> DynamicKCenter::member_slot(PointId p) const {
  auto it = member_slot_.find(p);
  if (it == member_slot_.end()) return std::nullopt;
  return it->second;
}

void DynamicKCenter::attach(PointId p, std::size_t s) {
  DYNKC_CHECK(member_slot_.find(p) == member_slot_.end(), "attach of an already placed point");
  member_slot_[p] = s;
  slots_[s].members.insert(p);
}

void DynamicKCenter::detach(PointId p) {
  auto it = member_slot_.find(p);
  DYNKC_CHECK(it != member_slot_.end(), "detach of an unplaced point");
  slots_[it->second].members.erase(p);
  member_slot_.erase(it);
}

void DynamicKCenter::heap_add_center(PointId c, bool nonzombie) {
  for (PointId q : live_) {
    double d = metric_.dist(q, c);
    heap_all_[q].insert(c, d);
    if (nonzombie) heap_nz_[q].insert(c, d);
  }
}

void DynamicKCenter::heap_drop_center(PointId c) {
  for (PointId q : live_) {
    heap_all_[q].erase(c);
    heap_nz_[q].erase(c);
  }
}

void DynamicKCenter::set_label(std::size_t s, ClusterLabel lab) {
  ClusterLabel old = slots_[s].label;
  if (old == lab) return;
  bool was_z = old == ClusterLabel::kZombie;
  bool is_z = lab == ClusterLabel::kZombie;
  if (was_z != is_z) {
    DYNKC_CHECK(slot_center_live(s), "label flip on a slot without a live center");
    PointId c = slots_[s].center;
    for (PointId q : live_) {
      if (was_z)
        heap_nz_[q].insert(c, heap_all_[q].key_of(c));
      else
        heap_nz_[q].erase(c);
    }
  }
  slots_[s].label = lab;
}

void DynamicKCenter::reassign_all_nearest() {
  for (PointId p : live_) {
    auto cit = center_slot_.find(p);
    if (cit != center_slot_.end()) continue;
    auto& h = heap_all_[p];
    DYNKC_CHECK(!h.empty(), "live non-center with no reachable center");
    std::size_t s = center_slot_.at(h.min().id);
    auto mit = member_slot_.find(p);
    if (mit != member_slot_.end() && mit->second == s) continue;
    if (mit != member_slot_.end()) detach(p);
    attach(p, s);
  }
}

void DynamicKCenter::decreasing() {
  if (slots_.empty()) return;
  double r = radius();

  double far_all = 0.0;
  bool coverable = true;
  for (PointId p : live_) {
    auto& h = heap_all_[p];
    if (h.empty()) {
      coverable = false;
      break;
    }
    far_all = std::max(far_all, h.min().key);
  }
  if (coverable && far_all <= r) {
    int j = level_for(far_all);
    if (j < level_) level_ = j;
    reassign_all_nearest();
    for (std::size_t s = 0; s < slots_.size(); ++s)
      if (slot_center_live(s)) set_label(s, ClusterLabel::kRegular);
    return;
  }

  for (std::size_t s = 0; s < slots_.size(); ++s) {
    if (!slot_center_live(s) || slots_[s].label == ClusterLabel::kRegular) continue;
    PointId c = slots_[s].center;
    bool tight = true;
    for (PointId m : slots_[s].members) {
      if (heap_all_[m].key_of(c) > r) {
        tight = false;
        break;
      }
    }
    if (tight) set_label(s, ClusterLabel::kRegular);
  }

  for (PointId p : live_) {
    if (center_slot_.count(p)) continue;
    std::size_t home = member_slot_.at(p);
    double own = slot_center_live(home) ? heap_all_[p].key_of(slots_[home].center) : kInf;
    if (own <= r) continue;
    auto& hn = heap_nz_[p];
    if (hn.empty() || hn.min().key > r) continue;
    std::size_t to = center_slot_.at(hn.min().id);
    if (to == home) continue;
    detach(p);
    attach(p, to);
  }
}

std::optional<std::pair<std::size_t, std::size_t>> DynamicKCenter::close_pair() const {
  double r = radius();
  for (std::size_t i = 0; i + 1 < slots_.size(); ++i)
    for (std::size_t j = i + 1; j < slots_.size(); ++j)
      if (metric_.dist(slots_[i].center, slots_[j].center) <= r) return std::make_pair(i, j);
  return std::nullopt;
}

void DynamicKCenter::absorb(std::size_t i, std::size_t j) {
  DYNKC_CHECK(slot_center_live(i) && slot_center_live(j), "absorb needs two live centers");
  PointId cj = slots_[j].center;
  std::vector<PointId> moved(slots_[j].members.begin(), slots_[j].members.end());
  for (PointId m : moved) {
    detach(m);
    attach(m, i);
  }
  center_slot_.erase(cj);
  heap_drop_center(cj);
  attach(cj, i);
  set_label(i, ClusterLabel::kExtended);
  slots_[j].label = ClusterLabel::kZombie;  // shell until refilled
}

void DynamicKCenter::erase_slot(std::size_t s) {
  DYNKC_CHECK(!slot_center_live(s) && slots_[s].members.empty(), "erase of a non-empty slot");
  slots_.erase(slots_.begin() + static_cast<std::ptrdiff_t>(s));
  for (auto& [id, idx] : center_slot_) {
    DYNKC_CHECK(idx != s, "center index points at the erased slot");
    if (idx > s) --idx;
  }
  for (auto& [id, idx] : member_slot_) {
    DYNKC_CHECK(idx != s, "member index points at the erased slot");
    if (idx > s) --idx;
  }
}

void DynamicKCenter::repair_slot(std::size_t s, PointId tombstone,
                                 const std::unordered_map<PointId, double>* root_dist) {
  double r = radius();

  // C1: a member out of range of every surviving center restarts the cluster.
  std::optional<PointId> orphan;
  for (PointId m : slots_[s].members) {
    auto& h = heap_all_[m];
    if (h.empty() || h.min().key > r) {
      orphan = m;
      break;
    }
  }
  if (orphan) {
    detach(*orphan);
    slots_[s].center = *orphan;
    center_slot_[*orphan] = s;
    heap_add_center(*orphan, false);
    return;  // label stays zombie
  }

  // C2: walk the blocked-edge graph from the lost center.
  SeqSearchState st;
  st.metric = &metric_;
  st.r = r;
  st.root_slot = s;
  st.center_points.reserve(slots_.size());
  st.clusters.reserve(slots_.size());
  for (const Slot& sl : slots_) {
    st.center_points.push_back(sl.center);
    st.clusters.emplace_back(sl.members.begin(), sl.members.end());
  }
  auto dist_fn = [&](PointId q, std::size_t t) -> double {
    if (t == s) return root_dist ? root_dist->at(q) : heap_all_.at(q).key_of(tombstone);
    return heap_all_.at(q).key_of(slots_[t].center);
  };
  auto near_fn = [&](PointId q) -> std::optional<std::pair<double, std::size_t>> {
    auto& h = heap_all_.at(q);
    if (h.empty()) return std::nullopt;
    auto mn = h.min();
    return std::make_pair(mn.key, center_slot_.at(mn.id));
  };
  SeqGraphResult res = find_sequence_graph(st, dist_fn, near_fn);

  if (res.found) {
    std::size_t l = res.sequence_slots.size();
    DYNKC_CHECK(res.sequence.size() == 2 * l, "malformed replacement sequence");
    // Centers about to change slots keep their heap entries; only their
    // non-zombie listing has to go once the receiving slot turns zombie.
    std::vector<PointId> was_nonzombie;
    for (std::size_t i = 1; i < l; ++i) {
      std::size_t t = res.sequence_slots[i];
      if (slots_[t].label != ClusterLabel::kZombie) was_nonzombie.push_back(slots_[t].center);
    }
    for (std::size_t i = 0; i + 1 < l; ++i) {
      PointId c = res.sequence[2 * (i + 1)];
      slots_[res.sequence_slots[i]].center = c;
      center_slot_[c] = res.sequence_slots[i];
    }
    PointId promoted = res.sequence.back();
    detach(promoted);
    slots_[res.sequence_slots[l - 1]].center = promoted;
    center_slot_[promoted] = res.sequence_slots[l - 1];
    for (std::size_t t : res.sequence_slots) slots_[t].label = ClusterLabel::kZombie;
    for (PointId c : was_nonzombie)
      for (PointId q : live_) heap_nz_[q].erase(c);
    heap_add_center(promoted, false);
    return;
  }

  // C2 fallback: every far member has a covering target; dissolve the cluster.
  for (std::size_t t : res.visited_slots)
    for (PointId x : res.explore[t]) {
      detach(x);
      attach(x, res.blocked_slot.at(x));
    }
  std::vector<PointId> near(slots_[s].members.begin(), slots_[s].members.end());
  for (PointId m : near) {
    auto& h = heap_all_.at(m);
    DYNKC_CHECK(!h.empty() && h.min().key <= r, "uncovered member after a failed orphan scan");
    detach(m);
    attach(m, center_slot_.at(h.min().id));
  }
  for (std::size_t t : res.visited_slots) {
    if (t == s) continue;
    set_label(t, ClusterLabel::kRegular);
  }
  erase_slot(s);
}

void DynamicKCenter::insert_point(PointId p) {
  live_.insert(p);
  IndexedMinHeap ha;
  IndexedMinHeap hn;
  for (std::size_t s = 0; s < slots_.size(); ++s) {
    DYNKC_CHECK(slot_center_live(s), "insert against a slot under repair");
    PointId c = slots_[s].center;
    double d = metric_.dist(p, c);
    ha.insert(c, d);
    if (slots_[s].label != ClusterLabel::kZombie) hn.insert(c, d);
  }
  heap_all_[p] = std::move(ha);
  heap_nz_[p] = std::move(hn);
  double r = radius();

  if (slots_.empty()) {
    slots_.push_back({p, ClusterLabel::kRegular, {}});
    center_slot_[p] = 0;
    heap_add_center(p, true);
    decreasing();
    return;
  }

  auto& hnz = heap_nz_[p];
  if (!hnz.empty() && hnz.min().key <= r) {
    attach(p, center_slot_.at(hnz.min().id));
    decreasing();
    return;
  }

  if (slots_.size() < static_cast<std::size_t>(prm_.k)) {
    std::size_t s = slots_.size();
    slots_.push_back({p, ClusterLabel::kRegular, {}});
    center_slot_[p] = s;
    heap_add_center(p, true);
    decreasing();
    return;
  }

  if (auto cp = close_pair()) {
    auto [i, j] = *cp;
    absorb(i, j);
    // Nearest zombie center within r, ties to the smaller id; it moves into
    // the freed slot, takes p plus its close old members, and leaves the rest
    // behind for a repair.
    std::optional<PointId> cz;
    double cz_d = kInf;
    for (std::size_t t = 0; t < slots_.size(); ++t) {
      if (!slot_center_live(t) || slots_[t].label != ClusterLabel::kZombie) continue;
      PointId c = slots_[t].center;
      double d = heap_all_[p].key_of(c);
      if (d > r) continue;
      if (d < cz_d || (d == cz_d && cz && c < *cz)) {
        cz = c;
        cz_d = d;
      }
    }
    if (cz) {
      std::size_t zs = center_slot_.at(*cz);
      slots_[j].center = *cz;
      center_slot_[*cz] = j;
      slots_[j].label = ClusterLabel::kZombie;
      set_label(j, ClusterLabel::kRegular);
      attach(p, j);
      std::vector<PointId> olds(slots_[zs].members.begin(), slots_[zs].members.end());
      for (PointId m : olds) {
        if (heap_all_[m].key_of(*cz) > r) continue;
        detach(m);
        attach(m, j);
      }
      repair_slot(zs, *cz, nullptr);
    } else {
      slots_[j].center = p;
      center_slot_[p] = j;
      slots_[j].label = ClusterLabel::kRegular;
      heap_add_center(p, true);
    }
    decreasing();
    return;
  }

  // No close pair: grow the radius until either some center pair closes or
  // every point is covered, then resolve the one remaining far point (if any)
  // with a single absorb.
  std::vector<std::vector<double>> pd(slots_.size(), std::vector<double>(slots_.size(), 0.0));
  double pairmin = kInf;
  for (std::size_t i = 0; i + 1 < slots_.size(); ++i)
    for (std::size_t j = i + 1; j < slots_.size(); ++j) {
      pd[i][j] = metric_.dist(slots_[i].center, slots_[j].center);
      pairmin = std::min(pairmin, pd[i][j]);
    }
  double farmin = 0.0;
  PointId far_id = p;
  for (PointId q : live_) {
    if (center_slot_.count(q)) continue;
    double mn = heap_all_[q].min().key;
    if (mn > farmin) {
      farmin = mn;
      far_id = q;
    }
  }
  while (pairmin > radius() && farmin > radius()) ++level_;
  r = radius();

  for (PointId q : live_) {
    if (center_slot_.count(q) || q == p) continue;
    std::size_t home = member_slot_.at(q);
    if (heap_all_[q].key_of(slots_[home].center) <= r) continue;
    auto mn = heap_all_[q].min();
    if (mn.key > r) continue;
    std::size_t to = center_slot_.at(mn.id);
    if (to == home) continue;
    detach(q);
    attach(q, to);
  }
  for (std::size_t s = 0; s < slots_.size(); ++s) {
    if (slots_[s].label == ClusterLabel::kRegular) continue;
    PointId c = slots_[s].center;
    bool tight = true;
    for (PointId m : slots_[s].members)
      if (heap_all_[m].key_of(c) > r) {
        tight = false;
        break;
      }
    if (tight) set_label(s, ClusterLabel::kRegular);
  }

  if (farmin > r) {
    std::optional<std::pair<std::size_t, std::size_t>> cp;
    for (std::size_t i = 0; !cp && i + 1 < slots_.size(); ++i)
      for (std::size_t j = i + 1; j < slots_.size(); ++j)
        if (pd[i][j] <= r) {
          cp = std::make_pair(i, j);
          break;
        }
    DYNKC_CHECK(cp.has_value(), "radius growth stopped with no close center pair");
    absorb(cp->first, cp->second);
    if (far_id != p) detach(far_id);
    slots_[cp->second].center = far_id;
    center_slot_[far_id] = cp->second;
    slots_[cp->second].label = ClusterLabel::kRegular;
    heap_add_center(far_id, true);
  }

  if (!center_slot_.count(p)) {
    auto& h = heap_all_[p];
    DYNKC_CHECK(!h.empty(), "inserted point sees no centers");
    auto mn = h.min();
    std::size_t s = center_slot_.at(mn.id);
    attach(p, s);
    if (mn.key > radius() && slots_[s].label == ClusterLabel::kRegular)
      slots_[s].label = ClusterLabel::kExtended;
  }
  decreasing();
}

void DynamicKCenter::delete_point(PointId p) {
  DYNKC_CHECK(live_.count(p) != 0, "delete of a point not tracked");
  auto cit = center_slot_.find(p);
  if (cit == center_slot_.end()) {
    detach(p);
    heap_all_.erase(p);
    heap_nz_.erase(p);
    live_.erase(p);
    decreasing();
    return;
  }
  std::size_t s = cit->second;
  std::unordered_map<PointId, double> root_d;
  root_d.reserve(slots_[s].members.size());
  for (PointId m : slots_[s].members) root_d[m] = heap_all_[m].key_of(p);
  heap_drop_center(p);
  center_slot_.erase(cit);
  heap_all_.erase(p);
  heap_nz_.erase(p);
  live_.erase(p);
  slots_[s].label = ClusterLabel::kZombie;
  decreasing();
  repair_slot(s, p, &root_d);
}

void DynamicKCenter::preprocess(const std::vector<UpdateEvent>& initial) {
  std::vector<PointId> ids;
  ids.reserve(initial.size());
  for (const UpdateEvent& ev : initial) {
    DYNKC_CHECK(ev.kind == UpdateEvent::Kind::kInsert, "preprocess takes insertions only");
    ids.push_back(ev.id);
  }
  preprocess_ids(ids);
}

void DynamicKCenter::preprocess_ids(const std::vector<PointId>& ids) {
  DYNKC_CHECK(!updated_, "preprocess must precede all updates");
  slots_.clear();
  member_slot_.clear();
  center_slot_.clear();
  heap_all_.clear();
  heap_nz_.clear();
  live_.clear();
  r0_ = 1.0;
  level_ = 0;
  for (PointId id : ids) {
    DYNKC_CHECK(metric_.is_live(id), "preprocess id not registered in the metric");
    DYNKC_CHECK(live_.count(id) == 0, "duplicate ids in preprocess batch");
    insert_point(id);
  }

  // Replace the provisional unit base radius by the smallest positive
  // pairwise distance, then refit the ladder so every point is covered and
  // every cluster can honestly be regular.
  double base = kInf;
  std::vector<PointId> pts(live_.begin(), live_.end());
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      double d = metric_.dist(pts[i], pts[j]);
      if (d > 0.0 && d < base) base = d;
    }
  r0_ = std::isfinite(base) ? base : 1.0;
  double need = 0.0;
  for (PointId q : live_) {
    if (center_slot_.count(q)) continue;
    need = std::max(need, heap_all_[q].min().key);
  }
  level_ = level_for(need);
  reassign_all_nearest();
  for (std::size_t s = 0; s < slots_.size(); ++s) set_label(s, ClusterLabel::kRegular);
}

UpdateOutcome DynamicKCenter::apply(const UpdateEvent& ev) {
  updated_ = true;
  std::uint64_t evals0 = metric_.evals();
  std::vector<PointId> before = center_ids();
  if (ev.kind == UpdateEvent::Kind::kInsert) {
    DYNKC_CHECK(metric_.is_live(ev.id), "insert of a point unknown to the metric");
    DYNKC_CHECK(live_.count(ev.id) == 0, "insert of a point already tracked");
    insert_point(ev.id);
  } else {
    delete_point(ev.id);
  }
  DYNKC_CHECK(slots_.empty() == live_.empty(), "slot set and live set disagree on emptiness");
  std::vector<PointId> after = center_ids();
  std::vector<PointId> sym;
  std::set_symmetric_difference(before.begin(), before.end(), after.begin(), after.end(),
                                std::back_inserter(sym));
  UpdateOutcome out;
  out.n = live_.size();
  out.solution_size = after.size();
  out.recourse = static_cast<double>(sym.size()) / 2.0;
  out.work_units = metric_.evals() - evals0;
  return out;
}

std::vector<PointId> DynamicKCenter::solution() const { return center_ids(); }

double DynamicKCenter::solution_cost() const {
  double worst = 0.0;
  for (PointId p : live_) {
    auto it = heap_all_.find(p);
    DYNKC_CHECK(it != heap_all_.end() && !it->second.empty(), "live point with no center in reach");
    worst = std::max(worst, it->second.min().key);
  }
  return worst;
}

}  // namespace dynkc
