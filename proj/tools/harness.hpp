#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dynkc/budget_sparsifier.hpp"
#include "dynkc/combined.hpp"
#include "dynkc/kcenter.hpp"
#include "dynkc/merged_sparsifier.hpp"
#include "dynkc/metric.hpp"
#include "dynkc/recourse_sparsifier.hpp"
#include "dynkc/stream.hpp"
#include "dynkc/types.hpp"

// Shared plumbing between the command line tool and the acceptance tests:
// engine construction, stream replay with metric bookkeeping, CSV emission,
// and the verification suites.

namespace dynkc::harness {

enum class AlgoKind { kMpbiStatic, kRec, kBudget, kMerged, kKCenter, kCombined };

// Flag spelling <-> enum; throws ValidationError on unknown names.
AlgoKind parse_algo(const std::string& name);
std::string algo_name(AlgoKind a);
std::vector<std::string> algo_names();

std::unique_ptr<DynamicClusterer> make_engine(AlgoKind a, MetricSpace& m, const Params& prm);

// Reads and parses a stream file ("-" reads stdin). A relative #matrix path
// resolves against the stream file's directory.
Stream load_stream(const std::string& path);
MetricSpace make_metric(const Stream& s);

struct ReplayOptions {
  std::size_t preload = 0;     // leading insertions handed to preprocess
  std::size_t cost_every = 0;  // 0 disables the cost column
  bool oracle = false;         // opt cost + ratio at cost checkpoints (guarded)
  bool wall = true;
};

struct ReplayRow {
  std::uint64_t update_idx = 0;
  char op = '+';
  std::size_t n = 0;
  std::size_t solution_size = 0;
  double recourse = 0.0;
  std::uint64_t work_units = 0;
  std::optional<double> cost;
  std::optional<double> opt_cost;
  std::optional<double> ratio;
  std::uint64_t wall_ns = 0;
};

// Feeds the stream through the engine, registering points in the metric
// around each apply. on_row fires once per post-preload event; on_step (when
// set) fires right after, with the engine in its post-update state, for
// invariant sweeps.
void replay(const Stream& s, MetricSpace& m, DynamicClusterer& engine, const Params& prm,
            const ReplayOptions& opts, const std::function<void(const ReplayRow&)>& on_row,
            const std::function<void(std::uint64_t)>& on_step = {});

void write_csv_header(std::ostream& os, const ReplayOptions& opts);
void write_csv_row(std::ostream& os, const ReplayOptions& opts, const ReplayRow& row);

// Co-simulates a generated stream against a fresh engine (the adaptive
// strategy reads the engine's solution before emitting each update). per_step
// fires after every update with the engine in its post-update state.
struct DriveStep {
  std::uint64_t idx;
  const UpdateEvent& ev;
  const UpdateOutcome& out;
  DynamicClusterer& engine;
  MetricSpace& metric;
  const PointSet& live;
};
void drive(const GeneratorConfig& cfg, AlgoKind a, const Params& prm,
           const std::function<void(const DriveStep&)>& per_step);

// ---- verification ----------------------------------------------------------

struct PropertyResult {
  std::string name;
  bool pass = true;
  std::uint64_t checked = 0;
  std::uint64_t violations = 0;
  double rate = 1.0;  // pass fraction over checked instances
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  bool pass = true;
  std::vector<PropertyResult> properties;
};

struct VerifyScale {
  std::size_t updates = 1500;
  std::size_t n = 0;       // initial population; 0 = suite default
  int k = 0;               // 0 = suite default
  std::size_t trials = 0;  // 0 = suite default
  std::uint64_t seed = 1;
};

const std::vector<std::string>& suite_names();
SuiteReport run_suite(const std::string& name, const VerifyScale& scale);
std::string report_json(const std::vector<SuiteReport>& reports);

// Per-update state checks, shared by the invariants suite and the acceptance
// gate. Empty optional means the state is consistent.
std::optional<std::string> check_transition_state(const RecourseSparsifier& e);
std::optional<std::string> check_transition_state(const MergedSparsifier& e);
std::optional<std::string> check_budget_partition(const BudgetSparsifier& e);
std::optional<std::string> check_kcenter_state(const DynamicKCenter& e, const MetricSpace& m);

// Recourse cap for one engine kind under the default parameters.
double recourse_cap(AlgoKind a, const Params& prm);

// Labels and cluster membership of the exact-size engine, as JSON (debug aid
// for failing differential runs).
std::string kcenter_state_json(const DynamicKCenter& e);

}  // namespace dynkc::harness
