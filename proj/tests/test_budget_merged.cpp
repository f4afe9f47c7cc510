#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <map>
#include <vector>

#include "dynkc/budget_sparsifier.hpp"
#include "dynkc/merged_sparsifier.hpp"
#include "dynkc/metric.hpp"
#include "dynkc/stream.hpp"

using namespace dynkc;

namespace {

template <typename Engine>
struct Rig {
  MetricSpace metric;
  StreamGenerator gen;
  Engine engine;
  PointSet live;

  Rig(const GeneratorConfig& cfg, const Params& prm)
      : metric(cfg.dim), gen(cfg), engine(metric, prm) {
    for (const auto& ev : gen.initial_events()) {
      metric.add_point(ev.id, ev.coords);
      live.insert(ev.id);
    }
    engine.preprocess(gen.initial_events());
  }

  UpdateOutcome step(const UpdateEvent& ev) {
    if (ev.kind == UpdateEvent::Kind::kInsert) {
      metric.add_point(ev.id, ev.coords);
      live.insert(ev.id);
      return engine.apply(ev);
    }
    UpdateOutcome out = engine.apply(ev);
    metric.remove_point(ev.id);
    live.erase(ev.id);
    return out;
  }

  UpdateOutcome advance() {
    return step(gen.next([this] { return engine.solution(); }));
  }
};

// Work cap of one adversarial update: one budget per possible level slot.
std::uint64_t work_cap(const Params& prm, std::size_t n) {
  return std::uint64_t(max_levels(prm, n) + 1.0) * units_per_update(prm, n);
}

bool is_partition(const BudgetSparsifier& e, const PointSet& live) {
  for (PointId p : live) {
    auto h = e.home_of(p);
    if (!h || *h > e.top_index()) return false;
    if (*h == e.top_index()) {
      if (!e.top_set().count(p)) return false;
      if (e.sigma().center_of(p) != p) return false;
    } else {
      auto c = e.sigma().center_of(p);
      const auto& sample = e.levels()[*h].sample;
      if (!c || !std::binary_search(sample.begin(), sample.end(), *c)) return false;
    }
  }
  for (PointId p : e.top_set())
    if (!live.count(p)) return false;
  return true;
}

}  // namespace

TEST_CASE("budget preprocess yields a partition with live sorted samples") {
  GeneratorConfig cfg;
  cfg.n_init = 1000;
  cfg.dim = 2;
  cfg.seed = 3;
  Params prm;
  prm.k = 2;
  Rig<BudgetSparsifier> rig(cfg, prm);
  const BudgetSparsifier& e = rig.engine;

  CHECK(e.live() == rig.live);
  CHECK(e.levels().size() == e.top_index());
  CHECK(is_partition(e, rig.live));
  for (const auto& lv : e.levels()) {
    CHECK(std::is_sorted(lv.sample.begin(), lv.sample.end()));
    CHECK(lv.nu >= 0.0);
    bool live_ok = true;
    for (PointId p : lv.sample) live_ok = live_ok && rig.live.count(p) == 1;
    CHECK(live_ok);
  }

  // flat list: pairwise distinct, sorted view equals solution()
  std::vector<PointId> flat = e.solution_list();
  std::vector<PointId> sorted_flat = flat;
  std::sort(sorted_flat.begin(), sorted_flat.end());
  CHECK(std::adjacent_find(sorted_flat.begin(), sorted_flat.end()) == sorted_flat.end());
  CHECK(sorted_flat == e.solution());
}

TEST_CASE("budget updates respect the per-update work cap") {
  GeneratorConfig cfg;
  cfg.n_init = 1000;
  cfg.dim = 2;
  cfg.seed = 9;
  Params prm;
  prm.k = 2;
  Rig<BudgetSparsifier> rig(cfg, prm);

  for (int i = 0; i < 150; ++i) {
    UpdateOutcome out = rig.advance();
    CHECK(out.work_units <= work_cap(prm, out.n));
    CHECK(out.solution_size == rig.engine.solution().size());
  }
  CHECK(is_partition(rig.engine, rig.live));
}

TEST_CASE("background builders finish and their suffixes get adopted") {
  GeneratorConfig cfg;
  cfg.n_init = 2048;
  cfg.dim = 2;
  cfg.seed = 17;
  Params prm;
  prm.k = 2;
  Rig<BudgetSparsifier> rig(cfg, prm);

  // rebuilders cover every proper level slot from the start
  auto st0 = rig.engine.builder_status();
  CHECK(st0.size() >= rig.engine.top_index());

  std::map<std::size_t, std::uint64_t> max_gen;
  std::uint64_t adoptions0 = rig.engine.adoption_count();
  for (int i = 0; i < 150; ++i) {
    rig.advance();
    for (const auto& b : rig.engine.builder_status()) {
      auto it = max_gen.find(b.slot);
      if (it != max_gen.end()) CHECK(b.generation >= it->second);
      max_gen[b.slot] = std::max(max_gen[b.slot], b.generation);
    }
  }
  // fresh suffixes replaced published ones along the way
  CHECK(rig.engine.adoption_count() > adoptions0);
  CHECK(is_partition(rig.engine, rig.live));
}

TEST_CASE("deleting published centers keeps samples live and the cover intact") {
  GeneratorConfig cfg;
  cfg.n_init = 600;
  cfg.dim = 2;
  cfg.seed = 23;
  Params prm;
  prm.k = 1;
  Rig<BudgetSparsifier> rig(cfg, prm);

  for (int round = 0; round < 30; ++round) {
    std::vector<PointId> sol = rig.engine.solution();
    REQUIRE(!sol.empty());
    PointId victim = sol[std::size_t(round * 7) % sol.size()];
    rig.step({UpdateEvent::Kind::kDelete, victim, {}});

    bool samples_live = true;
    for (const auto& lv : rig.engine.levels())
      for (PointId p : lv.sample) samples_live = samples_live && rig.live.count(p) == 1;
    CHECK(samples_live);
    CHECK(is_partition(rig.engine, rig.live));
    auto s = rig.engine.solution();
    CHECK_FALSE(std::binary_search(s.begin(), s.end(), victim));
  }
}

TEST_CASE("budget runs are reproducible for a fixed seed") {
  GeneratorConfig cfg;
  cfg.n_init = 400;
  cfg.dim = 2;
  cfg.seed = 29;
  Params prm;
  prm.k = 2;
  prm.seed = 29;
  Rig<BudgetSparsifier> a(cfg, prm), b(cfg, prm);
  for (int i = 0; i < 40; ++i) {
    UpdateOutcome oa = a.advance();
    UpdateOutcome ob = b.advance();
    CHECK(oa.work_units == ob.work_units);
    CHECK(a.engine.solution() == b.engine.solution());
  }
  CHECK(a.engine.adoption_count() == b.engine.adoption_count());
}

TEST_CASE("merged publication trails the inner engine within its caps") {
  GeneratorConfig cfg;
  cfg.kind = GeneratorKind::kAdaptiveDeleteCenter;
  cfg.n_init = 500;
  cfg.dim = 2;
  cfg.seed = 31;
  Params prm;
  prm.k = 2;
  Rig<MergedSparsifier> rig(cfg, prm);

  double rec_cap = sync_steps_per_update(prm, prm.rho) + 3.0;
  for (int i = 0; i < 200; ++i) {
    UpdateOutcome out = rig.advance();
    CHECK(out.recourse <= rec_cap);
    CHECK(out.work_units <= work_cap(prm, out.n));
    CHECK((rig.engine.sub_phase() == 1 || rig.engine.sub_phase() == 2));

    // published support never strays outside the live set, and every live
    // point resolves to a published center
    const auto& hat = rig.engine.hat();
    bool ok = true;
    for (PointId p : hat.support_sorted()) ok = ok && rig.live.count(p) == 1;
    for (PointId p : rig.live) {
      auto c = rig.engine.sigma_hat().center_of(p);
      ok = ok && c && hat.contains(*c);
    }
    CHECK(ok);
  }

  const auto& recs = rig.engine.phase_records();
  REQUIRE(!recs.empty());
  for (std::size_t i = 0; i + 1 < recs.size(); ++i)
    CHECK(double(recs[i].updates) <=
          std::ceil(prm.lambda * level_threshold(prm, recs[i].n_at_start)) + 1.0);
}

TEST_CASE("merged and plain budget share the inner structure") {
  GeneratorConfig cfg;
  cfg.n_init = 300;
  cfg.dim = 2;
  cfg.seed = 37;
  Params prm;
  prm.k = 2;
  prm.seed = 37;
  Rig<MergedSparsifier> m(cfg, prm);
  Rig<BudgetSparsifier> b(cfg, prm);
  for (int i = 0; i < 60; ++i) {
    // identical oblivious streams: neither engine's solution feeds back
    m.step(m.gen.next({}));
    b.step(b.gen.next({}));
    CHECK(m.engine.inner().solution() == b.engine.solution());
  }
}

TEST_CASE("budget preprocess after the first update is rejected") {
  MetricSpace m(2);
  Params prm;
  prm.k = 1;
  BudgetSparsifier e(m, prm);
  e.preprocess({});
  m.add_point(0, {0.0, 0.0});
  e.apply({UpdateEvent::Kind::kInsert, 0, {0.0, 0.0}});
  CHECK_THROWS_AS(e.preprocess({}), InternalError);
}
