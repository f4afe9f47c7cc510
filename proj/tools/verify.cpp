#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dynkc/level.hpp"
#include "dynkc/oracles.hpp"
#include "harness.hpp"
#include "json.hpp"

namespace dynkc::harness {

namespace {

std::string id_str(PointId p) { return std::to_string(p); }

// Phase-transition subset checks shared by the recourse engine and the merged
// engine; both expose the same published-state surface.
template <typename Engine>
std::optional<std::string> check_transition_common(const Engine& e, const PointSet& live) {
  const HatMultiset& hat = e.hat();
  for (const auto& [p, c] : hat.counts())
    if (!live.count(p)) return "published point " + id_str(p) + " is not live";

  int sp = e.sub_phase();
  if (sp != 1 && sp != 2) return "sub-phase " + std::to_string(sp) + " out of range";

  const std::vector<PointId>& target = sp == 1 ? e.target_prev() : e.target_cur();
  const PointSet& inserted = sp == 1 ? e.inserted_prev() : e.inserted_cur();
  for (PointId p : target)
    if (!hat.contains(p)) return "target point " + id_str(p) + " missing from the published set";
  for (PointId p : inserted)
    if (!hat.contains(p))
      return "shielded insertion " + id_str(p) + " missing from the published set";
  for (PointId p : e.inserted_cur())
    if (!hat.contains(p))
      return "current-phase insertion " + id_str(p) + " missing from the published set";

  for (PointId p : live) {
    auto c = e.sigma_hat().center_of(p);
    if (!c) return "live point " + id_str(p) + " has no published assignment";
    if (!hat.contains(*c))
      return "assignment of " + id_str(p) + " targets unpublished " + id_str(*c);
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::string> check_transition_state(const RecourseSparsifier& e) {
  return check_transition_common(e, e.live());
}

std::optional<std::string> check_transition_state(const MergedSparsifier& e) {
  return check_transition_common(e, e.inner().live());
}

std::optional<std::string> check_budget_partition(const BudgetSparsifier& e) {
  const PointSet& live = e.live();
  const auto& levels = e.levels();
  std::size_t top = e.top_index();
  if (levels.size() != top) return "level count disagrees with the top index";

  for (PointId p : live) {
    auto h = e.home_of(p);
    if (!h) return "live point " + id_str(p) + " has no home level";
    if (*h > top) return "home of " + id_str(p) + " lies past the top level";
    auto c = e.sigma().center_of(p);
    if (!c) return "live point " + id_str(p) + " has no assigned center";
    if (*h == top) {
      if (!e.top_set().count(p)) return "point " + id_str(p) + " homed at top but not in the top set";
      if (*c != p) return "top member " + id_str(p) + " is not its own center";
    } else {
      const auto& sample = levels[*h].sample;
      if (!std::binary_search(sample.begin(), sample.end(), *c))
        return "ball member " + id_str(p) + " assigned outside its level sample";
    }
  }
  for (PointId p : e.top_set()) {
    if (!live.count(p)) return "top member " + id_str(p) + " is not live";
    auto h = e.home_of(p);
    if (!h || *h != top) return "top member " + id_str(p) + " homed elsewhere";
  }

  std::set<PointId> seen;
  for (const auto& lv : levels) {
    if (!std::is_sorted(lv.sample.begin(), lv.sample.end()))
      return "level sample is not sorted";
    for (PointId c : lv.sample) {
      if (!live.count(c)) return "sample point " + id_str(c) + " is not live";
      if (!seen.insert(c).second) return "sample point " + id_str(c) + " repeats across levels";
    }
  }
  for (PointId p : e.top_set())
    if (seen.count(p)) return "top member " + id_str(p) + " duplicates a sample point";

  std::vector<PointId> flat = e.solution_list();
  std::set<PointId> fset(flat.begin(), flat.end());
  if (fset.size() != flat.size()) return "flat solution repeats an entry";
  std::vector<PointId> fsorted(fset.begin(), fset.end());
  if (e.solution() != fsorted) return "published support diverges from the level structure";
  return std::nullopt;
}

std::optional<std::string> check_kcenter_state(const DynamicKCenter& e, const MetricSpace& m) {
  const auto& slots = e.slots();
  const PointSet& live = e.live();
  double r = e.radius();

  std::set<PointId> centers;
  std::set<PointId> covered;
  for (std::size_t s = 0; s < slots.size(); ++s) {
    const auto& sl = slots[s];
    if (!live.count(sl.center)) return "slot center " + id_str(sl.center) + " is not live";
    if (!centers.insert(sl.center).second)
      return "center " + id_str(sl.center) + " occupies two slots";
    if (e.member_slot(sl.center))
      return "center " + id_str(sl.center) + " is simultaneously a member";
    for (PointId p : sl.members) {
      if (!live.count(p)) return "member " + id_str(p) + " is not live";
      if (!covered.insert(p).second) return "member " + id_str(p) + " sits in two clusters";
      auto ms = e.member_slot(p);
      if (!ms || *ms != s) return "member map disagrees with cluster " + std::to_string(s);
      if (sl.label == ClusterLabel::kRegular && m.dist(p, sl.center) > r) {
        std::ostringstream os;
        os << "regular member " << p << " at " << m.dist(p, sl.center) << " beyond radius " << r;
        return os.str();
      }
    }
  }
  for (PointId c : centers)
    if (covered.count(c)) return "center " + id_str(c) + " doubles as a member";
  if (centers.size() + covered.size() != live.size())
    return "clusters do not partition the live set";

  double brute = 0.0;
  for (PointId p : live) {
    if (centers.count(p)) continue;
    brute = std::max(brute, dist_to_set(m, p, centers).dist);
  }
  if (brute != e.solution_cost()) {
    std::ostringstream os;
    os << "maintained cost " << e.solution_cost() << " diverges from full scan " << brute;
    return os.str();
  }
  return std::nullopt;
}

double recourse_cap(AlgoKind a, const Params& prm) {
  switch (a) {
    case AlgoKind::kRec:
      return static_cast<double>(sync_steps_per_update(prm)) + 3.0;
    case AlgoKind::kMerged:
    case AlgoKind::kCombined:
      return static_cast<double>(sync_steps_per_update(prm, prm.rho)) + 3.0;
    case AlgoKind::kKCenter:
      return 1.0;
    default:
      return std::numeric_limits<double>::infinity();
  }
}

namespace {

constexpr GeneratorKind kStrategies[] = {GeneratorKind::kObliviousRandom,
                                         GeneratorKind::kAdaptiveDeleteCenter,
                                         GeneratorKind::kChurn};

const char* strategy_tag(GeneratorKind g) {
  switch (g) {
    case GeneratorKind::kObliviousRandom: return "oblivious_random";
    case GeneratorKind::kAdaptiveDeleteCenter: return "adaptive_delete_center";
    case GeneratorKind::kChurn: return "churn";
  }
  return "?";
}

void note_violation(PropertyResult& pr, const std::string& detail) {
  ++pr.violations;
  if (pr.detail.empty()) pr.detail = detail;
}

// min_rate 1.0 means zero tolerance; anything checked must never fail.
PropertyResult seal(PropertyResult pr, double min_rate) {
  if (pr.checked == 0) {
    pr.pass = false;
    pr.rate = 0.0;
    if (pr.detail.empty()) pr.detail = "no instances checked";
    return pr;
  }
  pr.rate = 1.0 - static_cast<double>(pr.violations) / static_cast<double>(pr.checked);
  pr.pass = min_rate >= 1.0 ? pr.violations == 0 : pr.rate >= min_rate;
  return pr;
}

void push_and_fold(SuiteReport& rep, PropertyResult pr) {
  rep.pass = rep.pass && pr.pass;
  rep.properties.push_back(std::move(pr));
}

std::optional<std::string> check_engine_state(DynamicClusterer& engine, MetricSpace& m,
                                              const Params& prm) {
  if (auto* rec = dynamic_cast<const RecourseSparsifier*>(&engine))
    return check_transition_state(*rec);
  if (auto* bud = dynamic_cast<const BudgetSparsifier*>(&engine))
    return check_budget_partition(*bud);
  if (auto* mer = dynamic_cast<const MergedSparsifier*>(&engine))
    return check_transition_state(*mer);
  if (auto* kc = dynamic_cast<const DynamicKCenter*>(&engine)) {
    if (kc->solution().size() > static_cast<std::size_t>(prm.k))
      return "more than k centers";
    return check_kcenter_state(*kc, m);
  }
  if (auto* comb = dynamic_cast<const CombinedClusterer*>(&engine)) {
    if (auto err = check_transition_state(comb->sparsifier())) return err;
    if (comb->refiner().solution().size() > static_cast<std::size_t>(prm.k))
      return "more than k centers";
    if (auto err = check_kcenter_state(comb->refiner(), m)) return err;
    std::vector<PointId> support = comb->sparsifier().solution();
    const PointSet& inner_live = comb->refiner().live();
    if (inner_live.size() != support.size() ||
        !std::equal(inner_live.begin(), inner_live.end(), support.begin()))
      return "refiner point set diverges from the published support";
    return std::nullopt;
  }
  return std::nullopt;
}

SuiteReport suite_invariants(const VerifyScale& sc) {
  SuiteReport rep{"invariants", true, {}};
  Params prm;
  prm.k = sc.k ? sc.k : 5;
  prm.seed = sc.seed;
  const AlgoKind engines[] = {AlgoKind::kRec, AlgoKind::kBudget, AlgoKind::kMerged,
                              AlgoKind::kKCenter, AlgoKind::kCombined};
  std::uint64_t tag = 0;
  for (AlgoKind a : engines)
    for (GeneratorKind g : kStrategies) {
      PropertyResult pr;
      pr.name = algo_name(a) + "/" + strategy_tag(g);
      GeneratorConfig cfg;
      cfg.kind = g;
      cfg.n_init = sc.n ? sc.n : 120;
      cfg.n_updates = sc.updates;
      cfg.seed = derive_seed(sc.seed, ++tag);
      drive(cfg, a, prm, [&](const DriveStep& s) {
        ++pr.checked;
        if (auto err = check_engine_state(s.engine, s.metric, prm))
          note_violation(pr, "update " + std::to_string(s.idx) + ": " + *err);
      });
      push_and_fold(rep, seal(pr, 1.0));
    }
  return rep;
}

MetricSpace make_uniform_metric(std::size_t n, std::mt19937_64& rng) {
  MetricSpace m(2);
  for (PointId id = 0; id < n; ++id)
    m.add_point(id, {uniform_real(rng) * 100.0, uniform_real(rng) * 100.0});
  return m;
}

std::vector<PointId> draw_distinct(std::mt19937_64& rng, std::size_t universe, std::size_t count) {
  std::set<PointId> out;
  while (out.size() < count) out.insert(uniform_index(rng, universe));
  return {out.begin(), out.end()};
}

SuiteReport suite_oracle_equivalence(const VerifyScale& sc) {
  SuiteReport rep{"oracle-equivalence", true, {}};

  {
    PropertyResult pr;
    pr.name = "select_radius_matches_sorted_oracle";
    std::size_t trials = sc.trials ? sc.trials : 1000;
    std::mt19937_64 rng(derive_seed(sc.seed, 101));
    MetricSpace m = make_uniform_metric(256, rng);
    for (std::size_t t = 0; t < trials; ++t) {
      std::size_t usz = 2 + uniform_index(rng, 39);
      std::size_t ssz = 1 + uniform_index(rng, 8);
      std::vector<PointId> U = draw_distinct(rng, 256, usz);
      std::vector<PointId> S = draw_distinct(rng, 256, ssz);
      double beta = 0.05 + 0.9 * uniform_real(rng);
      double fast = select_radius(m, U, S, beta);
      double slow = select_radius_sorted(m, U, S, beta);
      ++pr.checked;
      if (fast != slow) {
        std::ostringstream os;
        os << "trial " << t << ": " << fast << " vs sorted " << slow;
        note_violation(pr, os.str());
      }
    }
    push_and_fold(rep, seal(pr, 1.0));
  }

  {
    PropertyResult pr;
    pr.name = "find_sequence_matches_exhaustive_search";
    std::size_t trials = sc.trials ? sc.trials : 500;
    std::mt19937_64 rng(derive_seed(sc.seed, 202));
    for (std::size_t t = 0; t < trials; ++t) {
      std::size_t n = 4 + uniform_index(rng, 11);
      MetricSpace m = make_uniform_metric(n, rng);
      std::size_t nslots = 2 + uniform_index(rng, std::min<std::size_t>(3, n / 2 - 1));
      std::vector<PointId> ids(n);
      for (PointId i = 0; i < n; ++i) ids[i] = i;
      for (std::size_t i = n; i > 1; --i)
        std::swap(ids[i - 1], ids[uniform_index(rng, i)]);

      SeqSearchState st;
      st.metric = &m;
      st.clusters.resize(nslots);
      for (std::size_t s = 0; s < nslots; ++s) st.center_points.push_back(ids[s]);
      for (std::size_t i = nslots; i < n; ++i)
        st.clusters[uniform_index(rng, nslots)].push_back(ids[i]);
      for (auto& cl : st.clusters) std::sort(cl.begin(), cl.end());
      st.root_slot = uniform_index(rng, nslots);
      PointId a = uniform_index(rng, n);
      PointId b = uniform_index(rng, n);
      if (a == b) b = (b + 1) % n;
      st.r = m.dist(a, b) * (0.6 + 0.8 * uniform_real(rng));

      SeqSearchResult want = exhaustive_seq_search(st);
      auto dist_fn = [&](PointId p, std::size_t slot) {
        return m.dist(p, st.center_points[slot]);
      };
      auto near_fn = [&](PointId p) -> std::optional<std::pair<double, std::size_t>> {
        std::optional<std::pair<double, std::size_t>> best;
        for (std::size_t s = 0; s < nslots; ++s) {
          if (s == st.root_slot) continue;
          double d = m.dist(p, st.center_points[s]);
          if (!best || d < best->first ||
              (d == best->first && st.center_points[s] < st.center_points[best->second]))
            best = {d, s};
        }
        return best;
      };
      SeqGraphResult got = find_sequence_graph(st, dist_fn, near_fn);

      bool ok = got.found == want.found && got.visited_slots == want.visited_slots &&
                (!got.found || got.sequence == want.sequence);
      ++pr.checked;
      if (!ok) note_violation(pr, "trial " + std::to_string(t) + ": search results diverge");
    }
    push_and_fold(rep, seal(pr, 1.0));
  }

  {
    PropertyResult pr;
    pr.name = "quantile_radius_lower_bounds_optimum";
    std::size_t trials = sc.trials ? sc.trials : 50;
    std::mt19937_64 rng(derive_seed(sc.seed, 303));
    Params prm;
    for (std::size_t t = 0; t < trials; ++t) {
      std::size_t n = 6 + uniform_index(rng, 9);
      int k = 1 + static_cast<int>(uniform_index(rng, 3));
      MetricSpace m = make_uniform_metric(n, rng);
      std::vector<PointId> P(n);
      for (PointId i = 0; i < n; ++i) P[i] = i;
      double mu = mu_quantile(m, P, prm.gamma, P, k);
      double opt = opt_kcenter(m, P, k).cost;
      ++pr.checked;
      if (!(mu <= opt + 1e-12)) {
        std::ostringstream os;
        os << "trial " << t << ": mu " << mu << " exceeds optimum " << opt;
        note_violation(pr, os.str());
      }
    }
    push_and_fold(rep, seal(pr, 1.0));
  }

  {
    PropertyResult pr;
    pr.name = "level_radius_within_twice_quantile";
    std::size_t trials = sc.trials ? sc.trials : 200;
    std::size_t n = sc.n ? sc.n : 512;
    Params prm;
    prm.k = 1;
    for (std::size_t t = 0; t < trials; ++t) {
      std::mt19937_64 rng(derive_seed(sc.seed, 404 + t));
      MetricSpace m = make_uniform_metric(n, rng);
      std::vector<PointId> U(n);
      for (PointId i = 0; i < n; ++i) U[i] = i;
      LevelBuild lb = build_level(m, U, prm, n, rng);
      double mu = mu_quantile(m, U, prm.gamma, U, 1);
      ++pr.checked;
      if (!(lb.nu <= 2.0 * mu + 1e-12)) {
        std::ostringstream os;
        os << "trial " << t << ": nu " << lb.nu << " exceeds twice mu " << mu;
        note_violation(pr, os.str());
      }
    }
    push_and_fold(rep, seal(pr, 0.95));
  }

  return rep;
}

SuiteReport suite_recourse_bounds(const VerifyScale& sc) {
  SuiteReport rep{"recourse-bounds", true, {}};
  Params prm;
  prm.k = sc.k ? sc.k : 5;
  prm.seed = sc.seed;
  std::size_t streams = sc.trials ? sc.trials : 3;
  const AlgoKind engines[] = {AlgoKind::kRec, AlgoKind::kMerged, AlgoKind::kKCenter,
                              AlgoKind::kCombined};
  const GeneratorKind gens[] = {GeneratorKind::kAdaptiveDeleteCenter, GeneratorKind::kChurn};
  std::uint64_t tag = 1000;
  for (AlgoKind a : engines)
    for (GeneratorKind g : gens) {
      PropertyResult pr;
      pr.name = algo_name(a) + "/" + strategy_tag(g);
      double cap = recourse_cap(a, prm);
      double worst = 0.0;
      for (std::size_t s = 0; s < streams; ++s) {
        GeneratorConfig cfg;
        cfg.kind = g;
        cfg.n_init = sc.n ? sc.n : 100;
        cfg.n_updates = sc.updates;
        cfg.seed = derive_seed(sc.seed, ++tag);
        drive(cfg, a, prm, [&](const DriveStep& st) {
          ++pr.checked;
          worst = std::max(worst, st.out.recourse);
          if (st.out.recourse > cap) {
            std::ostringstream os;
            os << "stream " << s << " update " << st.idx << ": recourse " << st.out.recourse
               << " over cap " << cap;
            note_violation(pr, os.str());
          }
        });
      }
      pr = seal(pr, 1.0);
      if (pr.detail.empty()) {
        std::ostringstream os;
        os << "max observed " << worst << " against cap " << cap;
        pr.detail = os.str();
      }
      push_and_fold(rep, pr);
    }
  return rep;
}

SuiteReport suite_work_bounds(const VerifyScale& sc) {
  SuiteReport rep{"work-bounds", true, {}};
  const GeneratorKind gens[] = {GeneratorKind::kAdaptiveDeleteCenter, GeneratorKind::kChurn};

  {
    Params prm;
    prm.k = sc.k ? sc.k : 2;
    prm.seed = sc.seed;
    const AlgoKind engines[] = {AlgoKind::kBudget, AlgoKind::kMerged};
    std::uint64_t tag = 2000;
    for (AlgoKind a : engines)
      for (GeneratorKind g : gens) {
        PropertyResult pr;
        pr.name = algo_name(a) + "/" + strategy_tag(g);
        double worst_frac = 0.0;
        GeneratorConfig cfg;
        cfg.kind = g;
        cfg.n_init = sc.n ? sc.n : 1000;
        cfg.n_updates = sc.updates;
        cfg.seed = derive_seed(sc.seed, ++tag);
        drive(cfg, a, prm, [&](const DriveStep& st) {
          ++pr.checked;
          double bound = (max_levels(prm, st.out.n) + 1.0) *
                         static_cast<double>(units_per_update(prm, st.out.n));
          double used = static_cast<double>(st.out.work_units);
          if (bound > 0.0) worst_frac = std::max(worst_frac, used / bound);
          if (used > bound) {
            std::ostringstream os;
            os << "update " << st.idx << ": " << st.out.work_units << " units over bound "
               << bound;
            note_violation(pr, os.str());
          }
        });
        pr = seal(pr, 1.0);
        if (pr.detail.empty()) {
          std::ostringstream os;
          os << "peak budget utilisation " << worst_frac;
          pr.detail = os.str();
        }
        push_and_fold(rep, pr);
      }
  }

  {
    // The exact-size engine has no spec'd per-update unit cap; calibrate a
    // linearithmic envelope on a small fixed-seed run, then flag (without
    // failing) any later breach of four times that constant.
    Params prm;
    prm.k = sc.k ? sc.k : 5;
    prm.seed = sc.seed;
    double c_cal = 0.0;
    {
      GeneratorConfig cfg;
      cfg.kind = GeneratorKind::kChurn;
      cfg.n_init = 64;
      cfg.n_updates = 300;
      cfg.seed = derive_seed(sc.seed, 2101);
      drive(cfg, AlgoKind::kKCenter, prm, [&](const DriveStep& st) {
        if (st.out.n < 2) return;
        double denom = static_cast<double>(st.out.n) * log2n(st.out.n);
        c_cal = std::max(c_cal, static_cast<double>(st.out.work_units) / denom);
      });
    }
    double envelope = 4.0 * c_cal;
    std::uint64_t tag = 2200;
    for (GeneratorKind g : gens) {
      PropertyResult pr;
      pr.name = std::string("kcenter/") + strategy_tag(g);
      GeneratorConfig cfg;
      cfg.kind = g;
      cfg.n_init = sc.n ? sc.n : 256;
      cfg.n_updates = sc.updates;
      cfg.seed = derive_seed(sc.seed, ++tag);
      drive(cfg, AlgoKind::kKCenter, prm, [&](const DriveStep& st) {
        if (st.out.n < 2) return;
        ++pr.checked;
        double denom = static_cast<double>(st.out.n) * log2n(st.out.n);
        if (static_cast<double>(st.out.work_units) > envelope * denom) ++pr.violations;
      });
      pr.rate = pr.checked == 0
                    ? 1.0
                    : 1.0 - static_cast<double>(pr.violations) / static_cast<double>(pr.checked);
      pr.pass = true;  // advisory envelope: breaches are reported, not fatal
      std::ostringstream os;
      os << "envelope 4*" << c_cal << "*n*log2(n); " << pr.violations
         << " update(s) flagged above it";
      pr.detail = os.str();
      push_and_fold(rep, pr);
    }
  }

  return rep;
}

SuiteReport suite_cost_ratio(const VerifyScale& sc) {
  SuiteReport rep{"cost-ratio", true, {}};
  Params prm;
  prm.k = (sc.k && sc.k <= 3) ? sc.k : 3;
  prm.seed = sc.seed;
  std::size_t n_init = (sc.n && sc.n <= 16) ? sc.n : 14;

  struct Case {
    AlgoKind algo;
    double factor;
  };
  const Case cases[] = {{AlgoKind::kMpbiStatic, 4.0},
                        {AlgoKind::kRec, 8.0},
                        {AlgoKind::kMerged, 8.0},
                        {AlgoKind::kCombined, 8.0 + 2.0 * prm.ratio_max}};
  const GeneratorKind gens[] = {GeneratorKind::kChurn, GeneratorKind::kAdaptiveDeleteCenter};
  std::uint64_t tag = 3000;
  for (const Case& c : cases) {
    PropertyResult pr;
    std::ostringstream name;
    name << algo_name(c.algo) << "_cost_le_" << c.factor << "x_opt";
    pr.name = name.str();
    for (GeneratorKind g : gens) {
      GeneratorConfig cfg;
      cfg.kind = g;
      cfg.n_init = n_init;
      cfg.n_updates = sc.updates;
      cfg.seed = derive_seed(sc.seed, ++tag);
      drive(cfg, c.algo, prm, [&](const DriveStep& st) {
        if (st.idx % 10 != 0 || st.live.size() > 18 || st.live.empty()) return;
        double cost = st.engine.solution_cost();
        double opt =
            opt_kcenter(st.metric, std::vector<PointId>(st.live.begin(), st.live.end()), prm.k)
                .cost;
        ++pr.checked;
        bool ok = opt > 0.0 ? cost <= c.factor * opt + 1e-9 : cost <= 1e-12;
        if (!ok) {
          std::ostringstream os;
          os << strategy_tag(g) << " update " << st.idx << ": cost " << cost << " vs optimum "
             << opt;
          note_violation(pr, os.str());
        }
      });
    }
    push_and_fold(rep, seal(pr, 0.95));
  }
  return rep;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"invariants", "oracle-equivalence",
                                                 "recourse-bounds", "work-bounds", "cost-ratio"};
  return names;
}

SuiteReport run_suite(const std::string& name, const VerifyScale& scale) {
  if (name == "invariants") return suite_invariants(scale);
  if (name == "oracle-equivalence") return suite_oracle_equivalence(scale);
  if (name == "recourse-bounds") return suite_recourse_bounds(scale);
  if (name == "work-bounds") return suite_work_bounds(scale);
  if (name == "cost-ratio") return suite_cost_ratio(scale);
  throw ValidationError("unknown suite: " + name);
}

std::string kcenter_state_json(const DynamicKCenter& e) {
  nlohmann::json root;
  root["level"] = e.level();
  root["radius"] = e.radius();
  root["clusters"] = nlohmann::json::array();
  for (const auto& sl : e.slots()) {
    nlohmann::json jc;
    jc["center"] = sl.center;
    switch (sl.label) {
      case ClusterLabel::kRegular: jc["label"] = "regular"; break;
      case ClusterLabel::kExtended: jc["label"] = "extended"; break;
      case ClusterLabel::kZombie: jc["label"] = "zombie"; break;
    }
    jc["members"] = std::vector<PointId>(sl.members.begin(), sl.members.end());
    root["clusters"].push_back(std::move(jc));
  }
  return root.dump(2) + "\n";
}

std::string report_json(const std::vector<SuiteReport>& reports) {
  nlohmann::json root;
  bool all = true;
  root["suites"] = nlohmann::json::array();
  for (const SuiteReport& rep : reports) {
    nlohmann::json js;
    js["suite"] = rep.suite;
    js["pass"] = rep.pass;
    js["properties"] = nlohmann::json::array();
    for (const PropertyResult& pr : rep.properties) {
      nlohmann::json jp;
      jp["name"] = pr.name;
      jp["pass"] = pr.pass;
      jp["checked"] = pr.checked;
      jp["violations"] = pr.violations;
      jp["rate"] = pr.rate;
      if (!pr.detail.empty()) jp["detail"] = pr.detail;
      js["properties"].push_back(std::move(jp));
    }
    root["suites"].push_back(std::move(js));
    all = all && rep.pass;
  }
  root["pass"] = all;
  return root.dump(2) + "\n";
}

}  // namespace dynkc::harness
