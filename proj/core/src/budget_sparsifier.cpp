#include "dynkc/budget_sparsifier.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <random>

#include "dynkc/level.hpp"

namespace dynkc {

BudgetSparsifier::BudgetSparsifier(MetricSpace& m, const Params& prm)
    : metric_(m), prm_(prm) {
  prm_.validate();
  preprocess_ids({});
}

void BudgetSparsifier::preprocess(const std::vector<UpdateEvent>& initial) {
  std::vector<PointId> ids;
  ids.reserve(initial.size());
  for (const auto& ev : initial) {
    DYNKC_CHECK(ev.kind == UpdateEvent::Kind::kInsert, "preprocess takes insertions only");
    ids.push_back(ev.id);
  }
  preprocess_ids(ids);
}

void BudgetSparsifier::preprocess_ids(const std::vector<PointId>& ids) {
  DYNKC_CHECK(!updated_, "preprocess must precede all updates");
  live_.clear();
  for (PointId id : ids) live_.insert(id);
  DYNKC_CHECK(live_.size() == ids.size(), "duplicate ids in preprocess batch");

  levels_.clear();
  home_.clear();
  sigma_.clear();
  builders_.clear();
  gen_counter_ = 0;
  adoption_count_ = 0;

  // The initial structure is built in full; builders start on its level
  // inputs right away so a fresher suffix is always in flight.
  Params eprm = prm_;
  eprm.sampler = Sampler::kIndependent;
  std::size_t n = live_.size();
  PointSet U = live_;
  std::vector<PointSet> inputs;
  std::size_t j = 0;
  while (static_cast<double>(U.size()) > level_threshold(prm_, n)) {
    inputs.push_back(U);
    std::mt19937_64 rng(derive_seed(prm_.seed, j));
    std::vector<PointId> U_vec(U.begin(), U.end());
    LevelBuild b = build_level(metric_, U_vec, eprm, n, rng);
    levels_.push_back({b.sample, b.nu});
    for (const auto& [p, c] : b.ball_assign) {
      sigma_.assign(p, c);
      home_[p] = j;
      U.erase(p);
    }
    ++j;
  }
  top_ = j;
  terminal_lazy_ = std::move(U);
  for (PointId p : terminal_lazy_) {
    sigma_.assign(p, p);
    home_[p] = top_;
  }
  for (std::size_t s = 0; s < top_; ++s) start_builder(s, inputs[s]);

  published_ = HatMultiset();
  sync_published();
  published_.take_recourse();
  published_.take_support_delta();
}

UpdateOutcome BudgetSparsifier::apply(const UpdateEvent& ev) {
  updated_ = true;
  std::uint64_t evals0 = metric_.evals();
  if (ev.kind == UpdateEvent::Kind::kInsert)
    insert_point(ev.id);
  else
    delete_point(ev.id);

  std::uint64_t budget = units_per_update(prm_, live_.size());
  for (auto& [slot, b] : builders_)
    if (!b.finished) step_builder(b, budget);

  std::optional<std::size_t> ready;
  for (auto& [slot, b] : builders_)
    if (b.finished) {
      ready = slot;
      break;
    }
  if (ready) {
    adopt(*ready);
  } else if (static_cast<double>(terminal_lazy_.size()) > level_threshold(prm_, live_.size()) &&
             !builders_.count(top_)) {
    start_builder(top_, terminal_lazy_);
  }

  sync_published();
  UpdateOutcome out;
  out.n = live_.size();
  out.solution_size = published_.support_size();
  out.recourse = static_cast<double>(published_.take_recourse()) / 2.0;
  out.work_units = metric_.evals() - evals0;
  return out;
}

double BudgetSparsifier::solution_cost() const {
  if (live_.empty()) return 0.0;
  std::vector<PointId> sup = published_.support_sorted();
  if (sup.empty()) return std::numeric_limits<double>::infinity();
  double c = 0.0;
  for (PointId p : live_) c = std::max(c, dist_to_set(metric_, p, sup).dist);
  return c;
}

void BudgetSparsifier::insert_point(PointId p) {
  DYNKC_CHECK(!live_.count(p), "insertion of a live point");
  live_.insert(p);
  home_[p] = top_;
  sigma_.assign(p, p);
  terminal_lazy_.insert(p);
  for (auto& [slot, b] : builders_) {
    for (auto& lvl : b.done) lvl.lazy.insert(p);
    if (b.finished)
      b.lazy_terminal.insert(p);
    else
      b.lazy_pending.insert(p);
  }
}

void BudgetSparsifier::delete_point(PointId p) {
  DYNKC_CHECK(live_.count(p), "deletion of a point that is not live");
  live_.erase(p);
  auto it = home_.find(p);
  DYNKC_CHECK(it != home_.end(), "live point without a home level");
  std::size_t h = it->second;
  if (h == top_) {
    terminal_lazy_.erase(p);
  } else {
    replace_center(levels_[h].sample, sigma_, p);
  }
  sigma_.erase(p);
  home_.erase(it);
  for (auto& [slot, b] : builders_) {
    for (auto& lvl : b.done) {
      replace_center(lvl.sample, lvl.sigma, p);
      lvl.sigma.erase(p);
      lvl.lazy.erase(p);
    }
    if (b.finished)
      b.lazy_terminal.erase(p);
    else
      b.lazy_pending.erase(p);
  }
}

// Removes p from the sample if present, promoting the smallest-id survivor of
// its preimage that is not already a center. Callers erase p's own assignment
// afterwards.
void BudgetSparsifier::replace_center(std::vector<PointId>& sample, Assignment& sig, PointId p) {
  auto pos = std::lower_bound(sample.begin(), sample.end(), p);
  if (pos == sample.end() || *pos != p) return;
  sample.erase(pos);
  std::vector<PointId> rem = sig.preimage(p);
  std::optional<PointId> c;
  for (PointId q : rem)
    if (q != p && (!c || q < *c)) c = q;
  if (!c) return;
  sig.redirect(p, *c);
  if (!std::binary_search(sample.begin(), sample.end(), *c))
    sample.insert(std::lower_bound(sample.begin(), sample.end(), *c), *c);
}

void BudgetSparsifier::start_builder(std::size_t slot, const PointSet& input) {
  LevelBuilder b;
  b.slot = slot;
  b.generation = ++gen_counter_;
  b.lazy_pending = input;
  builders_[slot] = std::move(b);
}

void BudgetSparsifier::step_builder(LevelBuilder& b, std::uint64_t budget) {
  while (!b.finished) {
    switch (b.stage) {
      case LevelBuilder::Stage::kStart: {
        b.n_snap = live_.size();
        b.frozen.assign(b.lazy_pending.begin(), b.lazy_pending.end());
        if (static_cast<double>(b.frozen.size()) <= level_threshold(prm_, b.n_snap)) {
          b.finished = true;
          b.lazy_terminal = std::move(b.lazy_pending);
          b.lazy_pending.clear();
          return;
        }
        std::mt19937_64 rng(
            derive_seed(prm_.seed, (b.generation << 8) ^ static_cast<std::uint64_t>(b.level_counter)));
        double q = std::min(
            1.0, static_cast<double>(prm_.alpha * prm_.k) * log2n(b.n_snap) /
                     static_cast<double>(b.frozen.size()));
        b.sample.clear();
        for (int attempt = 0; attempt < 64 && b.sample.empty(); ++attempt)
          for (PointId id : b.frozen)
            if (uniform_real(rng) < q) b.sample.push_back(id);
        if (b.sample.empty())
          b.sample.push_back(b.frozen[uniform_index(rng, b.frozen.size())]);
        std::sort(b.sample.begin(), b.sample.end());
        b.rank = static_cast<std::size_t>(
            std::ceil(prm_.beta * static_cast<double>(b.frozen.size())));
        DYNKC_CHECK(b.rank >= 1 && b.rank <= b.frozen.size(), "radius rank out of range");
        b.d.assign(b.frozen.size(), std::numeric_limits<double>::infinity());
        b.amin.assign(b.frozen.size(), 0);
        b.cursor = 0;
        b.stage = LevelBuilder::Stage::kDist;
        break;
      }
      case LevelBuilder::Stage::kDist: {
        std::uint64_t per_point = b.sample.size();
        while (b.cursor < b.frozen.size()) {
          if (budget < per_point) return;
          budget -= per_point;
          PointId p = b.frozen[b.cursor];
          double best = std::numeric_limits<double>::infinity();
          PointId arg = b.sample.front();
          for (PointId s : b.sample) {
            double dd = metric_.dist(p, s);
            if (dd < best) {  // sample is ascending, so ties keep the smaller id
              best = dd;
              arg = s;
            }
          }
          b.d[b.cursor] = best;
          b.amin[b.cursor] = arg;
          ++b.cursor;
        }
        b.sel = b.d;
        b.sel_lo = 0;
        b.sel_hi = b.sel.size();
        b.sel_target = b.rank - 1;
        b.stage = LevelBuilder::Stage::kSelect;
        break;
      }
      case LevelBuilder::Stage::kSelect: {
        for (;;) {
          std::size_t span = b.sel_hi - b.sel_lo;
          if (budget < span) return;
          budget -= span;
          if (span <= 3) {
            std::sort(b.sel.begin() + b.sel_lo, b.sel.begin() + b.sel_hi);
            b.nu = b.sel[b.sel_target];
            break;
          }
          double a = b.sel[b.sel_lo];
          double m = b.sel[b.sel_lo + span / 2];
          double z = b.sel[b.sel_hi - 1];
          double pivot = std::max(std::min(a, m), std::min(std::max(a, m), z));
          std::size_t lt = b.sel_lo, i = b.sel_lo, gt = b.sel_hi;
          while (i < gt) {
            if (b.sel[i] < pivot)
              std::swap(b.sel[i++], b.sel[lt++]);
            else if (b.sel[i] > pivot)
              std::swap(b.sel[i], b.sel[--gt]);
            else
              ++i;
          }
          if (b.sel_target < lt) {
            b.sel_hi = lt;
          } else if (b.sel_target >= gt) {
            b.sel_lo = gt;
          } else {
            b.nu = pivot;
            break;
          }
        }
        b.sel.clear();
        b.sel.shrink_to_fit();
        b.stage = LevelBuilder::Stage::kComplete;
        break;
      }
      case LevelBuilder::Stage::kComplete: {
        complete_level(b);
        b.stage = LevelBuilder::Stage::kStart;
        ++b.level_counter;
        break;
      }
    }
  }
}

void BudgetSparsifier::complete_level(LevelBuilder& b) {
  CompletedLevel lvl;
  lvl.nu = b.nu;
  for (std::size_t i = 0; i < b.frozen.size(); ++i)
    if (b.d[i] <= b.nu && live_.count(b.frozen[i]))
      lvl.sigma.assign(b.frozen[i], b.amin[i]);
  lvl.sample = b.sample;
  // sample members that died during the build get replaced now, against the
  // assignment that was just computed
  for (PointId s : b.sample)
    if (!live_.count(s)) {
      replace_center(lvl.sample, lvl.sigma, s);
      lvl.sigma.erase(s);
    }
  lvl.lazy = b.lazy_pending;
  for (std::size_t i = 0; i < b.frozen.size(); ++i)
    if (b.d[i] <= b.nu) b.lazy_pending.erase(b.frozen[i]);
  b.done.push_back(std::move(lvl));
  b.frozen.clear();
  b.d.clear();
  b.amin.clear();
  b.sample.clear();
}

void BudgetSparsifier::adopt(std::size_t slot) {
  LevelBuilder b = std::move(builders_.at(slot));
  builders_.erase(slot);
  std::size_t top_new = slot + b.done.size();
  if (live_.size() >= 2)
    DYNKC_CHECK(static_cast<double>(top_new) <= max_levels(prm_, live_.size()),
                "level stack deeper than its guaranteed bound");

  levels_.resize(slot);
  for (const auto& lvl : b.done) levels_.push_back({lvl.sample, lvl.nu});

  std::vector<PointId> stale;
  for (const auto& [p, h] : home_)
    if (h >= slot) stale.push_back(p);
  for (PointId p : stale) {
    home_.erase(p);
    sigma_.erase(p);
  }
  for (std::size_t j = 0; j < b.done.size(); ++j)
    for (const auto& [q, c] : b.done[j].sigma.raw()) {
      sigma_.assign(q, c);
      home_[q] = slot + j;
    }
  terminal_lazy_ = std::move(b.lazy_terminal);
  for (PointId p : terminal_lazy_) {
    sigma_.assign(p, p);
    home_[p] = top_new;
  }
  top_ = top_new;
  DYNKC_CHECK(home_.size() == live_.size(), "adopted structure does not cover the point set");

  for (auto it = builders_.begin(); it != builders_.end();)
    it = it->first >= slot ? builders_.erase(it) : std::next(it);
  for (std::size_t j = slot; j < top_new; ++j) start_builder(j, b.done[j - slot].lazy);
  if (static_cast<double>(terminal_lazy_.size()) > level_threshold(prm_, live_.size()))
    start_builder(top_new, terminal_lazy_);
  ++adoption_count_;
}

std::vector<PointId> BudgetSparsifier::solution_list() const {
  std::vector<PointId> out;
  for (const auto& lvl : levels_) out.insert(out.end(), lvl.sample.begin(), lvl.sample.end());
  out.insert(out.end(), terminal_lazy_.begin(), terminal_lazy_.end());
  return out;
}

void BudgetSparsifier::sync_published() {
  std::vector<PointId> now = solution_list();
  std::sort(now.begin(), now.end());
  std::vector<PointId> before = published_.support_sorted();
  std::size_t i = 0, j = 0;
  while (i < before.size() || j < now.size()) {
    if (j == now.size() || (i < before.size() && before[i] < now[j])) {
      published_.remove_one(before[i]);
      ++i;
    } else if (i == before.size() || now[j] < before[i]) {
      published_.add(now[j]);
      ++j;
    } else {
      ++i;
      ++j;
    }
  }
}

std::vector<BudgetSparsifier::BuilderStatus> BudgetSparsifier::builder_status() const {
  std::vector<BuilderStatus> out;
  for (const auto& [slot, b] : builders_)
    out.push_back({slot, b.generation, b.done.size(), b.finished});
  return out;
}

}  // namespace dynkc
