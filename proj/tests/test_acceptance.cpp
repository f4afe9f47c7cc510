// Acceptance gate: one line per criterion, [PASS]/[FAIL]/[FLAG]. Soft gates
// (the evaluation-count envelope of the exact-size engine and the scaling
// ratio) flag instead of failing; everything else is zero tolerance at the
// scales pinned below. Exit status is nonzero iff a hard criterion failed.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dynkc/budget_sparsifier.hpp"
#include "dynkc/level.hpp"
#include "dynkc/merged_sparsifier.hpp"
#include "dynkc/metric.hpp"
#include "dynkc/recourse_sparsifier.hpp"
#include "harness.hpp"

using namespace dynkc;
using namespace dynkc::harness;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& note = "",
            bool soft = false) {
  const char* tag = pass ? "[PASS]" : (soft ? "[FLAG]" : "[FAIL]");
  if (!pass && !soft) ++failures;
  std::printf("%s criterion %d: %s%s%s\n", tag, id, name.c_str(),
              note.empty() ? "" : " -- ", note.c_str());
  std::fflush(stdout);
}

// Runs a verification suite and folds its properties into one line.
void suite_criterion(int id, const std::string& name, const std::string& suite,
                     const VerifyScale& scale) {
  SuiteReport rep = run_suite(suite, scale);
  std::string note;
  for (const auto& p : rep.properties) {
    if (!p.pass)
      note += (note.empty() ? "" : "; ") + p.name + ": " + p.detail;
    else if (p.violations > 0)  // advisory breaches inside a passing property
      note += (note.empty() ? "" : "; ") + p.name + " flagged " +
              std::to_string(p.violations) + " of " + std::to_string(p.checked);
  }
  if (note.empty())
    note = std::to_string(rep.properties.size()) + " properties clean";
  report(id, name, rep.pass, note);
}

// Criterion 4: published support size of the two sparsifiers, every update,
// across the pinned n x k grid, churn streams.
void criterion_size() {
  bool pass = true;
  std::string note;
  std::uint64_t checked = 0;
  for (std::size_t n : {std::size_t(50), std::size_t(500), std::size_t(2000)}) {
    for (int k : {2, 5, 10}) {
      GeneratorConfig cfg;
      cfg.kind = GeneratorKind::kChurn;
      cfg.n_init = n;
      cfg.dim = 2;
      cfg.n_updates = 600;
      cfg.seed = derive_seed(401, n * 100 + std::size_t(k));
      Params prm;
      prm.k = k;
      prm.seed = cfg.seed;

      drive(cfg, AlgoKind::kRec, prm, [&](const DriveStep& st) {
        const auto& e = dynamic_cast<const RecourseSparsifier&>(st.engine);
        double cap = (6.0 + 4.0 * prm.lambda) * level_threshold(prm, st.out.n);
        ++checked;
        if (double(e.hat().cardinality()) > cap && pass) {
          pass = false;
          note = "recourse-bounded support " + std::to_string(e.hat().cardinality()) +
                 " > " + std::to_string(cap) + " at n=" + std::to_string(st.out.n) +
                 " k=" + std::to_string(k);
        }
      });
      drive(cfg, AlgoKind::kMerged, prm, [&](const DriveStep& st) {
        const auto& e = dynamic_cast<const MergedSparsifier&>(st.engine);
        double cap = 2.0 * (prm.rho + prm.lambda) * level_threshold(prm, st.out.n);
        ++checked;
        if (double(e.hat().cardinality()) > cap && pass) {
          pass = false;
          note = "merged support " + std::to_string(e.hat().cardinality()) + " > " +
                 std::to_string(cap) + " at n=" + std::to_string(st.out.n) +
                 " k=" + std::to_string(k);
        }
      });
    }
  }
  if (pass) note = std::to_string(checked) + " update states within the size caps";
  report(4, "support size caps (grid n in {50,500,2000}, k in {2,5,10})", pass, note);
}

// Criterion 7a: completed publication phases never exceed
// lambda * alpha * k * log2(n) * log2(n/k) updates.
bool phase_lengths(std::string& note) {
  GeneratorConfig cfg;
  cfg.kind = GeneratorKind::kAdaptiveDeleteCenter;
  cfg.n_init = 1500;
  cfg.dim = 2;
  cfg.seed = derive_seed(701, 1);
  Params prm;
  prm.k = 2;
  prm.seed = cfg.seed;

  cfg.n_updates = 1200;
  std::vector<RecourseSparsifier::PhaseRecord> records;
  drive(cfg, AlgoKind::kRec, prm, [&](const DriveStep& st) {
    if (st.idx == cfg.n_updates)
      records = dynamic_cast<const RecourseSparsifier&>(st.engine).phase_records();
  });
  if (records.size() < 2) {
    note = "no completed phases observed";
    return false;
  }
  for (std::size_t i = 0; i + 1 < records.size(); ++i) {
    double cap = prm.lambda * level_threshold(prm, records[i].n_at_start);
    if (double(records[i].updates) > cap) {
      note = "phase " + std::to_string(records[i].ell) + " ran " +
             std::to_string(records[i].updates) + " updates, cap " + std::to_string(cap);
      return false;
    }
  }
  note = std::to_string(records.size() - 1) + " completed phases within cap";
  return true;
}

// Criterion 7b: the root rebuilder finishes each generation within
// epsilon * n updates, measured on an uninterrupted churn stream.
bool root_builder_completion(std::string& note) {
  GeneratorConfig cfg;
  cfg.kind = GeneratorKind::kChurn;
  cfg.n_init = 8192;
  cfg.dim = 2;
  cfg.seed = derive_seed(702, 1);
  Params prm;
  prm.k = 2;
  prm.seed = cfg.seed;

  struct Span {
    std::size_t n_start;
    std::uint64_t duration;
  };
  std::vector<Span> completed;
  bool have_gen = false;
  std::uint64_t cur_gen = 0, start_idx = 0;
  std::size_t start_n = 0;

  cfg.n_updates = 600;
  drive(cfg, AlgoKind::kBudget, prm, [&](const DriveStep& st) {
    const auto& e = dynamic_cast<const BudgetSparsifier&>(st.engine);
    for (const auto& b : e.builder_status()) {
      if (b.slot != 0) continue;
      // a finished root builder is adopted and replaced inside the same
      // apply, so the generation swap is the completion signal; the +1 keeps
      // the count conservative for generations created mid-apply
      if (have_gen && cur_gen != b.generation)
        completed.push_back({start_n, st.idx - start_idx + 1});
      if (!have_gen || cur_gen != b.generation) {
        have_gen = true;
        cur_gen = b.generation;
        start_idx = st.idx;
        start_n = st.live.size();
      }
    }
  });

  if (completed.size() < 2) {
    note = "only " + std::to_string(completed.size()) + " root generations completed";
    return false;
  }
  std::uint64_t worst = 0;
  for (const auto& s : completed) {
    worst = std::max(worst, s.duration);
    if (double(s.duration) > prm.epsilon * double(s.n_start)) {
      note = "root rebuild took " + std::to_string(s.duration) + " updates, cap " +
             std::to_string(prm.epsilon * double(s.n_start));
      return false;
    }
  }
  note = std::to_string(completed.size()) + " root generations, worst " +
         std::to_string(worst) + " updates vs cap " +
         std::to_string(std::uint64_t(prm.epsilon * 8192.0));
  return true;
}

// Criterion 7c: each peeling level shrinks the working set by at least the
// guaranteed fraction.
bool peel_shrink(std::string& note) {
  Params prm;
  prm.k = 2;
  std::uint64_t checked = 0, bad = 0;
  for (int seed = 0; seed < 30; ++seed) {
    std::mt19937_64 coord_rng(derive_seed(703, seed));
    MetricSpace m(2);
    std::vector<PointId> U;
    for (PointId i = 0; i < 4096; ++i) {
      m.add_point(i, {uniform_real(coord_rng) * 100.0, uniform_real(coord_rng) * 100.0});
      U.push_back(i);
    }
    std::mt19937_64 rng(derive_seed(704, seed));
    while (double(U.size()) > level_threshold(prm, 4096)) {
      LevelBuild lb = build_level(m, U, prm, 4096, rng);
      std::vector<PointId> covered;
      for (const auto& [p, c] : lb.ball_assign) covered.push_back(p);
      std::vector<PointId> next;
      std::set_difference(U.begin(), U.end(), covered.begin(), covered.end(),
                          std::back_inserter(next));
      ++checked;
      if (double(next.size()) > (1.0 - (prm.beta - prm.epsilon)) * double(U.size())) ++bad;
      if (next.size() == U.size()) break;  // defensive: no progress
      U = std::move(next);
    }
  }
  double rate = checked ? 1.0 - double(bad) / double(checked) : 0.0;
  std::ostringstream os;
  os << checked << " levels, shrink rate " << rate;
  note = os.str();
  return checked > 0 && rate >= 0.95;
}

// Criterion 8: evaluation growth of the combined engine per doubling of n,
// soft gate at 2.5x.
void criterion_scaling() {
  std::vector<std::size_t> sizes = {250, 500, 1000, 2000};
  std::vector<double> means;
  for (std::size_t n : sizes) {
    GeneratorConfig cfg;
    cfg.kind = GeneratorKind::kChurn;
    cfg.n_init = n;
    cfg.dim = 2;
    cfg.n_updates = 400;
    cfg.seed = derive_seed(801, n);
    Params prm;
    prm.k = 10;
    prm.seed = cfg.seed;
    std::uint64_t total = 0, count = 0;
    drive(cfg, AlgoKind::kCombined, prm, [&](const DriveStep& st) {
      total += st.out.work_units;
      ++count;
    });
    means.push_back(double(total) / double(count));
  }
  bool ok = true;
  std::ostringstream os;
  os << "mean evals/update";
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    os << " n=" << sizes[i] << ":" << std::uint64_t(means[i]);
    if (i > 0) {
      double ratio = means[i] / std::max(means[i - 1], 1.0);
      os << " (x" << ratio << ")";
      if (ratio >= 2.5) ok = false;
    }
  }
  report(8, "combined evaluation growth per doubling, soft gate 2.5x", ok, os.str(),
         /*soft=*/true);
}

}  // namespace

int main() {
  std::printf("acceptance sweep, pinned defaults (k varies per criterion)\n");

  {
    VerifyScale sc;
    sc.updates = 10000;
    sc.n = 100;
    sc.k = 5;
    sc.trials = 10;
    sc.seed = 11;
    suite_criterion(1, "per-update recourse caps, 10 streams x 10000 updates",
                    "recourse-bounds", sc);
  }
  {
    VerifyScale sc;
    sc.updates = 3000;
    sc.n = 1000;
    sc.k = 2;
    sc.seed = 12;
    suite_criterion(2, "per-update work budget (hard) and evaluation envelope (soft)",
                    "work-bounds", sc);
  }
  {
    VerifyScale sc;
    sc.updates = 2500;
    sc.n = 150;
    sc.k = 5;
    sc.seed = 13;
    suite_criterion(3, "state invariants after every update", "invariants", sc);
  }
  criterion_size();
  {
    VerifyScale sc;
    sc.updates = 2000;
    sc.seed = 15;
    suite_criterion(5, "cost ratios vs the exact optimum, small instances", "cost-ratio",
                    sc);
  }
  {
    VerifyScale sc;  // suite defaults match the required counts exactly
    sc.seed = 16;
    suite_criterion(6, "reference oracle equivalences", "oracle-equivalence", sc);
  }
  {
    std::string note;
    bool a = phase_lengths(note);
    report(7, "publication phase lengths within cap", a, note);
    std::string note_b;
    bool b = root_builder_completion(note_b);
    report(7, "root rebuilder completion within epsilon*n updates", b, note_b);
    std::string note_c;
    bool c = peel_shrink(note_c);
    report(7, "peeling shrink factor at the 95% rate", c, note_c);
  }
  criterion_scaling();

  if (failures == 0)
    std::printf("acceptance: all hard criteria passed\n");
  else
    std::printf("acceptance: %d hard criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
