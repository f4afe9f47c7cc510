#include "dynkc/recourse_sparsifier.hpp"

#include <algorithm>
#include <limits>
#include <optional>

namespace dynkc {

RecourseSparsifier::RecourseSparsifier(MetricSpace& m, const Params& prm)
    : metric_(m), prm_(prm) {
  prm_.validate();
  preprocess_ids({});
}

void RecourseSparsifier::preprocess(const std::vector<UpdateEvent>& initial) {
  std::vector<PointId> ids;
  ids.reserve(initial.size());
  for (const auto& ev : initial) {
    DYNKC_CHECK(ev.kind == UpdateEvent::Kind::kInsert, "preprocess takes insertions only");
    ids.push_back(ev.id);
  }
  preprocess_ids(ids);
}

void RecourseSparsifier::preprocess_ids(const std::vector<PointId>& ids) {
  DYNKC_CHECK(!updated_, "preprocess must precede all updates");
  live_.clear();
  for (PointId id : ids) live_.insert(id);
  DYNKC_CHECK(live_.size() == ids.size(), "duplicate ids in preprocess batch");

  levels_.clear();
  S_.clear();
  sigma_.clear();
  rebuild_from_layer(0);

  hat_ = HatMultiset();
  for (std::size_t j = 0; j < levels_.size(); ++j)
    for (PointId s : levels_[j].sample) hat_.add(s);
  target_cur_ = snapshot_solution_list();
  target_prev_ = target_cur_;
  rebuild_pos_map(target_cur_, target_cur_pos_);
  rebuild_pos_map(target_prev_, target_prev_pos_);
  sigma_prev_ = sigma_;
  sigma_cur_ = sigma_;
  sigma_hat_ = sigma_;
  ins_prev_.clear();
  ins_cur_.clear();
  del_list_.clear();
  sub_phase_ = 1;
  pos_ = 0;
  ell_ = 0;
  phase_records_.clear();
  phase_records_.push_back({0, live_.size(), 0});
  hat_.take_recourse();
  hat_.take_support_delta();
}

UpdateOutcome RecourseSparsifier::apply(const UpdateEvent& ev) {
  updated_ = true;
  std::uint64_t evals0 = metric_.evals();
  // phase length counts only updates that found sync work pending; quiet
  // stretches at the fixpoint are not part of any phase
  if (!at_fixpoint()) phase_records_.back().updates++;
  if (ev.kind == UpdateEvent::Kind::kInsert)
    insert_point(ev.id);
  else
    delete_point(ev.id);
  UpdateOutcome out;
  out.n = live_.size();
  out.solution_size = hat_.support_size();
  out.recourse = static_cast<double>(hat_.take_recourse());
  out.work_units = metric_.evals() - evals0;
  return out;
}

double RecourseSparsifier::solution_cost() const {
  if (live_.empty()) return 0.0;
  std::vector<PointId> sup = hat_.support_sorted();
  if (sup.empty()) return std::numeric_limits<double>::infinity();
  double c = 0.0;
  for (PointId p : live_) c = std::max(c, dist_to_set(metric_, p, sup).dist);
  return c;
}

void RecourseSparsifier::insert_point(PointId p) {
  DYNKC_CHECK(!live_.count(p), "insertion of a live point");
  live_.insert(p);
  for (auto& lvl : levels_) {
    lvl.U.insert(p);
    lvl.cnt++;
  }
  S_.insert(p);
  ins_cur_.insert(p);
  hat_.add(p);
  sigma_.assign(p, p);
  sigma_hat_.assign(p, p);
  check_threshold_rebuild();
  lazy_sync();
}

void RecourseSparsifier::delete_point(PointId p) {
  DYNKC_CHECK(live_.count(p), "deletion of a point that is not live");
  live_.erase(p);
  std::size_t deepest = 0;
  bool found = false;
  for (std::size_t j = levels_.size(); j-- > 0;) {
    if (levels_[j].U.count(p)) {
      deepest = j;
      found = true;
      break;
    }
  }
  DYNKC_CHECK(found, "live point missing from the base level");
  for (std::size_t j = 0; j <= deepest && j < levels_.size(); ++j) {
    levels_[j].U.erase(p);
    levels_[j].cnt++;
  }
  replace_in_flat(p);
  if (sub_phase_ == 1) replace_in_target(p, Target::kPrev);
  replace_in_target(p, Target::kCur);
  ins_prev_.erase(p);
  ins_cur_.erase(p);
  hat_.remove_all(p);
  sigma_.erase(p);
  sigma_hat_.erase(p);
  sigma_prev_.erase(p);
  sigma_cur_.erase(p);
  check_threshold_rebuild();
  lazy_sync();
}

void RecourseSparsifier::check_threshold_rebuild() {
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (static_cast<double>(levels_[i].cnt) > prm_.lambda * static_cast<double>(levels_[i].n_at_build)) {
      rebuild_from_layer(i);
      return;
    }
  }
}

void RecourseSparsifier::rebuild_from_layer(std::size_t i) {
  std::size_t n_now = live_.size();
  PointSet U = i < levels_.size() ? levels_[i].U : live_;
  if (levels_.empty() && i == 0) U = live_;
  levels_.resize(i);
  for (PointId p : U) sigma_.erase(p);

  std::uint64_t serial = rebuild_serial_++;
  std::size_t level_index = i;
  while (static_cast<double>(U.size()) > level_threshold(prm_, n_now)) {
    std::mt19937_64 rng(derive_seed(prm_.seed, (serial << 16) ^ level_index));
    std::vector<PointId> U_vec(U.begin(), U.end());
    LevelBuild b = build_level(metric_, U_vec, prm_, n_now, rng);
    Level lvl;
    lvl.U = U;
    lvl.n_at_build = U.size();
    lvl.cnt = 0;
    lvl.sample = b.sample;
    lvl.nu = b.nu;
    for (const auto& [p, c] : b.ball_assign) {
      sigma_.assign(p, c);
      U.erase(p);
    }
    levels_.push_back(std::move(lvl));
    ++level_index;
  }
  Level term;
  term.U = U;
  term.n_at_build = U.size();
  term.cnt = 0;
  term.sample.assign(U.begin(), U.end());
  term.nu = 0.0;
  for (PointId p : U) sigma_.assign(p, p);
  levels_.push_back(std::move(term));

  S_.clear();
  for (const auto& lvl : levels_)
    for (PointId s : lvl.sample) S_.insert(s);
}

void RecourseSparsifier::replace_in_flat(PointId p) {
  if (!S_.count(p)) return;
  S_.erase(p);
  std::vector<PointId>* home = nullptr;
  for (auto& lvl : levels_) {
    auto it = std::lower_bound(lvl.sample.begin(), lvl.sample.end(), p);
    if (it != lvl.sample.end() && *it == p) {
      lvl.sample.erase(it);
      home = &lvl.sample;
      break;
    }
  }
  std::vector<PointId> rem = sigma_.preimage(p);
  std::optional<PointId> c;
  for (PointId q : rem)
    if (q != p && (!c || q < *c)) c = q;
  if (c) {
    sigma_.redirect(p, *c);
    if (!S_.count(*c)) {
      S_.insert(*c);
      if (home) home->insert(std::lower_bound(home->begin(), home->end(), *c), *c);
    }
  }
}

void RecourseSparsifier::replace_in_target(PointId p, Target which) {
  auto& list = which == Target::kPrev ? target_prev_ : target_cur_;
  auto& posmap = which == Target::kPrev ? target_prev_pos_ : target_cur_pos_;
  auto& sig = which == Target::kPrev ? sigma_prev_ : sigma_cur_;
  auto it = posmap.find(p);
  if (it == posmap.end()) return;
  std::size_t slot = it->second;

  std::vector<PointId> rem = sig.preimage(p);
  std::optional<PointId> c;
  for (PointId q : rem)
    if (q != p && (!c || q < *c)) c = q;

  bool mirror_sigma_hat = (sub_phase_ == 1 && which == Target::kPrev) ||
                          (sub_phase_ == 2 && which == Target::kCur);
  if (c) {
    sig.redirect(p, *c);
    if (mirror_sigma_hat)
      for (PointId q : rem)
        if (q != p) sigma_hat_.assign(q, *c);
    if (!posmap.count(*c)) {
      list[slot] = *c;
      posmap.erase(it);
      posmap.emplace(*c, slot);
      if (hat_.contains(p)) {
        hat_.remove_one(p);
        hat_.add(*c);
      }
      return;
    }
    // replacement already present in the target (coincident points): the slot
    // just goes away, and only p's published copy is withdrawn
    if (hat_.contains(p)) hat_.remove_one(p);
  }
  list.erase(list.begin() + static_cast<std::ptrdiff_t>(slot));
  posmap.erase(p);
  for (auto& [id, idx] : posmap)
    if (idx > slot) --idx;
  if (sub_phase_ == 1 && which == Target::kCur && slot < pos_) --pos_;
}

void RecourseSparsifier::lazy_sync() {
  if (at_fixpoint()) return;
  std::uint64_t budget = sync_steps_per_update(prm_);
  for (std::uint64_t step = 0; step < budget; ++step) {
    if (sub_phase_ == 1) {
      if (pos_ < target_cur_.size()) {
        hat_.add(target_cur_[pos_]);
        ++pos_;
      }
      if (pos_ >= target_cur_.size()) {
        sigma_hat_ = sigma_cur_;
        sub_phase_ = 2;
        pos_ = 0;
        del_list_ = target_prev_;
        for (PointId q : ins_prev_) del_list_.push_back(q);
      }
    } else {
      if (pos_ < del_list_.size()) {
        hat_.remove_one(del_list_[pos_]);  // may be a no-op for points deleted meanwhile
        ++pos_;
      }
      if (pos_ >= del_list_.size()) {
        advance_phase();
        if (at_fixpoint()) return;
      }
    }
  }
}

void RecourseSparsifier::advance_phase() {
  ++ell_;
  target_prev_ = std::move(target_cur_);
  target_prev_pos_ = std::move(target_cur_pos_);
  sigma_prev_ = std::move(sigma_cur_);
  target_cur_ = snapshot_solution_list();
  rebuild_pos_map(target_cur_, target_cur_pos_);
  sigma_cur_ = sigma_;
  ins_prev_ = std::move(ins_cur_);
  ins_cur_.clear();
  sub_phase_ = 1;
  pos_ = 0;
  phase_records_.push_back({ell_, live_.size(), 0});
}

bool RecourseSparsifier::at_fixpoint() const {
  if (sub_phase_ != 1 || pos_ != 0) return false;
  if (!ins_prev_.empty() || !ins_cur_.empty()) return false;
  if (target_prev_ != target_cur_) return false;
  if (hat_.cardinality() != target_cur_.size()) return false;
  if (hat_.support_size() != target_cur_.size()) return false;
  for (PointId p : target_cur_)
    if (!hat_.contains(p)) return false;
  if (!(sigma_prev_ == sigma_cur_)) return false;
  if (!(sigma_cur_ == sigma_hat_)) return false;
  if (!(sigma_hat_ == sigma_)) return false;
  return true;
}

std::vector<PointId> RecourseSparsifier::snapshot_solution_list() const {
  std::vector<PointId> out;
  std::unordered_map<PointId, char> seen;
  for (const auto& lvl : levels_)
    for (PointId s : lvl.sample) {
      out.push_back(s);
      seen.emplace(s, 1);
    }
  for (PointId p : S_)
    if (!seen.count(p)) out.push_back(p);
  return out;
}

void RecourseSparsifier::rebuild_pos_map(const std::vector<PointId>& list,
                                         std::unordered_map<PointId, std::size_t>& map) const {
  map.clear();
  for (std::size_t i = 0; i < list.size(); ++i) {
    bool fresh = map.emplace(list[i], i).second;
    DYNKC_CHECK(fresh, "duplicate entry in a target list");
  }
}

}  // namespace dynkc
