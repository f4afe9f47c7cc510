#include "harness.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <utility>

#include "dynkc/level.hpp"
#include "dynkc/oracles.hpp"

namespace dynkc::harness {

namespace {

// Rebuild-per-update baseline: after every update the live set is peeled into
// levels from scratch and the solution is the union of the level samples plus
// the terminal working set. No state survives between updates except the
// solution itself (for the recourse delta) and the rebuild serial that keys
// the per-rebuild rng.
class StaticMpbi final : public DynamicClusterer {
 public:
  StaticMpbi(MetricSpace& m, const Params& prm) : metric_(m), prm_(prm) { prm_.validate(); }

  void preprocess(const std::vector<UpdateEvent>& initial) override {
    DYNKC_CHECK(!updated_, "preprocess after apply");
    for (const auto& ev : initial) {
      if (ev.kind != UpdateEvent::Kind::kInsert)
        throw ValidationError("preprocess accepts insertions only");
      live_.insert(ev.id);
    }
    rebuild();
  }

  UpdateOutcome apply(const UpdateEvent& ev) override {
    updated_ = true;
    std::uint64_t evals0 = metric_.evals();
    if (ev.kind == UpdateEvent::Kind::kInsert) {
      DYNKC_CHECK(live_.insert(ev.id).second, "duplicate insertion");
    } else {
      DYNKC_CHECK(live_.erase(ev.id) == 1, "deleting a point that is not live");
    }
    std::vector<PointId> before = solution_;
    rebuild();
    UpdateOutcome out;
    out.n = live_.size();
    out.solution_size = solution_.size();
    out.recourse = static_cast<double>(symmetric_difference_size(before, solution_)) / 2.0;
    out.work_units = metric_.evals() - evals0;
    return out;
  }

  std::vector<PointId> solution() const override { return solution_; }

  double solution_cost() const override {
    double worst = 0.0;
    for (PointId p : live_) worst = std::max(worst, dist_to_set(metric_, p, solution_).dist);
    return worst;
  }

 private:
  static std::size_t symmetric_difference_size(const std::vector<PointId>& a,
                                               const std::vector<PointId>& b) {
    std::vector<PointId> diff;
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(),
                                  std::back_inserter(diff));
    return diff.size();
  }

  void rebuild() {
    std::mt19937_64 rng(derive_seed(prm_.seed, ++serial_));
    std::vector<PointId> U(live_.begin(), live_.end());
    std::size_t n = U.size();
    std::vector<PointId> sol;
    while (static_cast<double>(U.size()) > level_threshold(prm_, n)) {
      LevelBuild lb = build_level(metric_, U, prm_, n, rng);
      sol.insert(sol.end(), lb.sample.begin(), lb.sample.end());
      std::vector<PointId> covered;
      covered.reserve(lb.ball_assign.size());
      for (const auto& [p, c] : lb.ball_assign) covered.push_back(p);
      std::vector<PointId> rest;
      std::set_difference(U.begin(), U.end(), covered.begin(), covered.end(),
                          std::back_inserter(rest));
      DYNKC_CHECK(rest.size() < U.size(), "peeling level removed nothing");
      U = std::move(rest);
    }
    sol.insert(sol.end(), U.begin(), U.end());
    std::sort(sol.begin(), sol.end());
    sol.erase(std::unique(sol.begin(), sol.end()), sol.end());
    solution_ = std::move(sol);
  }

  MetricSpace& metric_;
  Params prm_;
  PointSet live_;
  std::vector<PointId> solution_;
  std::uint64_t serial_ = 0;
  bool updated_ = false;
};

std::string read_all(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  return read_all(in);
}

}  // namespace

AlgoKind parse_algo(const std::string& name) {
  if (name == "mpbi-static") return AlgoKind::kMpbiStatic;
  if (name == "bicr-rec") return AlgoKind::kRec;
  if (name == "bicr-budget") return AlgoKind::kBudget;
  if (name == "bicr-merged") return AlgoKind::kMerged;
  if (name == "kcenter") return AlgoKind::kKCenter;
  if (name == "combined") return AlgoKind::kCombined;
  throw ValidationError("unknown algorithm: " + name);
}

std::string algo_name(AlgoKind a) {
  switch (a) {
    case AlgoKind::kMpbiStatic: return "mpbi-static";
    case AlgoKind::kRec: return "bicr-rec";
    case AlgoKind::kBudget: return "bicr-budget";
    case AlgoKind::kMerged: return "bicr-merged";
    case AlgoKind::kKCenter: return "kcenter";
    case AlgoKind::kCombined: return "combined";
  }
  throw InternalError("unhandled algorithm kind");
}

std::vector<std::string> algo_names() {
  return {"mpbi-static", "bicr-rec", "bicr-budget", "bicr-merged", "kcenter", "combined"};
}

std::unique_ptr<DynamicClusterer> make_engine(AlgoKind a, MetricSpace& m, const Params& prm) {
  switch (a) {
    case AlgoKind::kMpbiStatic: return std::make_unique<StaticMpbi>(m, prm);
    case AlgoKind::kRec: return std::make_unique<RecourseSparsifier>(m, prm);
    case AlgoKind::kBudget: return std::make_unique<BudgetSparsifier>(m, prm);
    case AlgoKind::kMerged: return std::make_unique<MergedSparsifier>(m, prm);
    case AlgoKind::kKCenter: return std::make_unique<DynamicKCenter>(m, prm);
    case AlgoKind::kCombined: return std::make_unique<CombinedClusterer>(m, prm);
  }
  throw InternalError("unhandled algorithm kind");
}

Stream load_stream(const std::string& path) {
  std::string text;
  std::filesystem::path dir;
  if (path == "-") {
    text = read_all(std::cin);
  } else {
    text = read_file(path);
    dir = std::filesystem::path(path).parent_path();
  }
  Stream s = parse_stream(text);
  if (s.matrix_mode()) {
    std::filesystem::path mp(s.matrix_path);
    if (mp.is_relative() && !dir.empty()) s.matrix_path = (dir / mp).string();
  }
  return s;
}

MetricSpace make_metric(const Stream& s) {
  if (s.matrix_mode()) return MetricSpace::from_matrix(parse_matrix(read_file(s.matrix_path)));
  return MetricSpace(s.dim);
}

void replay(const Stream& s, MetricSpace& m, DynamicClusterer& engine, const Params& prm,
            const ReplayOptions& opts, const std::function<void(const ReplayRow&)>& on_row,
            const std::function<void(std::uint64_t)>& on_step) {
  if (opts.preload > s.events.size()) throw ValidationError("preload exceeds the stream length");

  PointSet live;
  std::vector<UpdateEvent> initial(s.events.begin(),
                                   s.events.begin() + static_cast<std::ptrdiff_t>(opts.preload));
  for (const auto& ev : initial) {
    if (ev.kind != UpdateEvent::Kind::kInsert)
      throw ValidationError("preload must consist of insertions");
    m.add_point(ev.id, ev.coords);
    live.insert(ev.id);
  }
  engine.preprocess(initial);

  std::uint64_t idx = 0;
  for (std::size_t i = opts.preload; i < s.events.size(); ++i) {
    const UpdateEvent& ev = s.events[i];
    ++idx;
    ReplayRow row;
    row.update_idx = idx;
    row.op = ev.kind == UpdateEvent::Kind::kInsert ? '+' : '-';

    auto t0 = std::chrono::steady_clock::now();
    UpdateOutcome out;
    if (ev.kind == UpdateEvent::Kind::kInsert) {
      m.add_point(ev.id, ev.coords);
      live.insert(ev.id);
      out = engine.apply(ev);
    } else {
      out = engine.apply(ev);
      live.erase(ev.id);
      m.remove_point(ev.id);
    }
    auto t1 = std::chrono::steady_clock::now();
    row.wall_ns =
        static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());

    row.n = out.n;
    row.solution_size = out.solution_size;
    row.recourse = out.recourse;
    row.work_units = out.work_units;

    if (opts.cost_every != 0 && idx % opts.cost_every == 0) {
      row.cost = engine.solution_cost();
      if (opts.oracle && live.size() <= 18 && prm.k <= 4) {
        OptResult opt = opt_kcenter(m, std::vector<PointId>(live.begin(), live.end()), prm.k);
        row.opt_cost = opt.cost;
        if (opt.cost > 0.0)
          row.ratio = *row.cost / opt.cost;
        else
          row.ratio = *row.cost == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
      }
    }

    on_row(row);
    if (on_step) on_step(idx);
  }
}

void drive(const GeneratorConfig& cfg, AlgoKind a, const Params& prm,
           const std::function<void(const DriveStep&)>& per_step) {
  MetricSpace m(cfg.dim);
  auto engine = make_engine(a, m, prm);
  StreamGenerator gen(cfg);
  PointSet live;
  for (const auto& ev : gen.initial_events()) {
    m.add_point(ev.id, ev.coords);
    live.insert(ev.id);
  }
  engine->preprocess(gen.initial_events());
  auto view = [&]() { return engine->solution(); };
  for (std::uint64_t idx = 1; idx <= cfg.n_updates; ++idx) {
    UpdateEvent ev = gen.next(view);
    UpdateOutcome out;
    if (ev.kind == UpdateEvent::Kind::kInsert) {
      m.add_point(ev.id, ev.coords);
      live.insert(ev.id);
      out = engine->apply(ev);
    } else {
      out = engine->apply(ev);
      live.erase(ev.id);
      m.remove_point(ev.id);
    }
    per_step(DriveStep{idx, ev, out, *engine, m, live});
  }
}

void write_csv_header(std::ostream& os, const ReplayOptions& opts) {
  os << "update_idx,op,n,solution_size,recourse,work_units";
  if (opts.cost_every != 0) os << ",cost";
  if (opts.oracle) os << ",opt_cost,ratio";
  if (opts.wall) os << ",wall_ns";
  os << '\n';
}

void write_csv_row(std::ostream& os, const ReplayOptions& opts, const ReplayRow& row) {
  os << row.update_idx << ',' << row.op << ',' << row.n << ',' << row.solution_size << ','
     << format_double(row.recourse) << ',' << row.work_units;
  if (opts.cost_every != 0) {
    os << ',';
    if (row.cost) os << format_double(*row.cost);
  }
  if (opts.oracle) {
    os << ',';
    if (row.opt_cost) os << format_double(*row.opt_cost);
    os << ',';
    if (row.ratio) os << format_double(*row.ratio);
  }
  if (opts.wall) os << ',' << row.wall_ns;
  os << '\n';
}

}  // namespace dynkc::harness
