#include "dynkc/merged_sparsifier.hpp"

#include <algorithm>
#include <limits>
#include <optional>

namespace dynkc {

MergedSparsifier::MergedSparsifier(MetricSpace& m, const Params& prm)
    : metric_(m), prm_(prm), budget_(m, prm) {
  prm_.validate();
  preprocess_ids({});
}

void MergedSparsifier::preprocess(const std::vector<UpdateEvent>& initial) {
  std::vector<PointId> ids;
  ids.reserve(initial.size());
  for (const auto& ev : initial) {
    DYNKC_CHECK(ev.kind == UpdateEvent::Kind::kInsert, "preprocess takes insertions only");
    ids.push_back(ev.id);
  }
  preprocess_ids(ids);
}

void MergedSparsifier::preprocess_ids(const std::vector<PointId>& ids) {
  DYNKC_CHECK(!updated_, "preprocess must precede all updates");
  budget_.preprocess_ids(ids);

  hat_ = HatMultiset();
  target_cur_ = budget_.solution_list();
  target_prev_ = target_cur_;
  rebuild_pos_map(target_cur_, target_cur_pos_);
  rebuild_pos_map(target_prev_, target_prev_pos_);
  for (PointId s : target_cur_) hat_.add(s);
  sigma_cur_ = budget_.sigma();
  sigma_prev_ = sigma_cur_;
  sigma_hat_ = sigma_cur_;
  ins_prev_.clear();
  ins_cur_.clear();
  del_list_.clear();
  sub_phase_ = 1;
  pos_ = 0;
  ell_ = 0;
  phase_records_.clear();
  phase_records_.push_back({0, budget_.live().size(), 0});
  hat_.take_recourse();
  hat_.take_support_delta();
}

UpdateOutcome MergedSparsifier::apply(const UpdateEvent& ev) {
  updated_ = true;
  std::uint64_t evals0 = metric_.evals();
  // phase length counts only updates that found sync work pending; quiet
  // stretches at the fixpoint are not part of any phase
  if (!at_fixpoint()) phase_records_.back().updates++;
  budget_.apply(ev);
  if (ev.kind == UpdateEvent::Kind::kInsert) {
    ins_cur_.insert(ev.id);
    hat_.add(ev.id);
    sigma_hat_.assign(ev.id, ev.id);
  } else {
    if (sub_phase_ == 1) replace_in_target(ev.id, Target::kPrev);
    replace_in_target(ev.id, Target::kCur);
    ins_prev_.erase(ev.id);
    ins_cur_.erase(ev.id);
    hat_.remove_all(ev.id);
    sigma_hat_.erase(ev.id);
    sigma_prev_.erase(ev.id);
    sigma_cur_.erase(ev.id);
  }
  lazy_sync();

  std::size_t n = budget_.live().size();
  if (n >= 2)
    DYNKC_CHECK(static_cast<double>(budget_.solution_list().size()) <=
                    prm_.rho * level_threshold(prm_, n),
                "flat solution exceeds its size bound");

  UpdateOutcome out;
  out.n = n;
  out.solution_size = hat_.support_size();
  out.recourse = static_cast<double>(hat_.take_recourse());
  out.work_units = metric_.evals() - evals0;
  return out;
}

double MergedSparsifier::solution_cost() const {
  const PointSet& live = budget_.live();
  if (live.empty()) return 0.0;
  std::vector<PointId> sup = hat_.support_sorted();
  if (sup.empty()) return std::numeric_limits<double>::infinity();
  double c = 0.0;
  for (PointId p : live) c = std::max(c, dist_to_set(metric_, p, sup).dist);
  return c;
}

void MergedSparsifier::replace_in_target(PointId p, Target which) {
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

void MergedSparsifier::lazy_sync() {
  if (at_fixpoint()) return;
  std::uint64_t budget = sync_steps_per_update(prm_, prm_.rho);
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

void MergedSparsifier::advance_phase() {
  ++ell_;
  target_prev_ = std::move(target_cur_);
  target_prev_pos_ = std::move(target_cur_pos_);
  sigma_prev_ = std::move(sigma_cur_);
  target_cur_ = budget_.solution_list();
  rebuild_pos_map(target_cur_, target_cur_pos_);
  sigma_cur_ = budget_.sigma();
  ins_prev_ = std::move(ins_cur_);
  ins_cur_.clear();
  sub_phase_ = 1;
  pos_ = 0;
  phase_records_.push_back({ell_, budget_.live().size(), 0});
}

bool MergedSparsifier::at_fixpoint() const {
  if (sub_phase_ != 1 || pos_ != 0) return false;
  if (!ins_prev_.empty() || !ins_cur_.empty()) return false;
  if (target_prev_ != target_cur_) return false;
  if (hat_.cardinality() != target_cur_.size()) return false;
  if (hat_.support_size() != target_cur_.size()) return false;
  for (PointId p : target_cur_)
    if (!hat_.contains(p)) return false;
  if (!(sigma_prev_ == sigma_cur_)) return false;
  if (!(sigma_cur_ == sigma_hat_)) return false;
  if (!(sigma_hat_ == budget_.sigma())) return false;
  return true;
}

void MergedSparsifier::rebuild_pos_map(const std::vector<PointId>& list,
                                       std::unordered_map<PointId, std::size_t>& map) const {
  map.clear();
  for (std::size_t i = 0; i < list.size(); ++i) {
    bool fresh = map.emplace(list[i], i).second;
    DYNKC_CHECK(fresh, "duplicate entry in a target list");
  }
}

}  // namespace dynkc
