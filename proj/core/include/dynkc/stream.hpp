#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dynkc/metric.hpp"
#include "dynkc/types.hpp"

namespace dynkc {

struct UpdateEvent {
  enum class Kind { kInsert, kDelete };
  Kind kind;
  PointId id;
  std::vector<double> coords;  // empty for deletions and matrix-mode insertions

  bool operator==(const UpdateEvent&) const = default;
};

// A parsed stream file. Exactly one of dim/matrix_path may be set; dim 0 with
// an empty matrix_path means "no header" (euclidean, dimension taken from the
// first insertion).
struct Stream {
  std::size_t dim = 0;
  std::string matrix_path;
  std::vector<UpdateEvent> events;

  bool matrix_mode() const { return !matrix_path.empty(); }
};

// Strict line format, one event per line, single spaces:
//   #dim <d>          (optional header)
//   #matrix <path>    (alternative header)
//   + <id> <x1> ... <xd>
//   + <id>            (matrix mode)
//   - <id>
// Insertion ids must be strictly increasing; deletions must hit live points.
// Reals serialize in shortest round-trip form, so serialize(parse(s)) == s for
// canonical files.
Stream parse_stream(std::string_view text);
std::string serialize_stream(const Stream& s);

std::string format_double(double v);

// Matrix file: first line n, then n rows of n reals.
std::vector<std::vector<double>> parse_matrix(std::string_view text);

enum class GeneratorKind { kObliviousRandom, kAdaptiveDeleteCenter, kChurn };

struct GeneratorConfig {
  GeneratorKind kind = GeneratorKind::kObliviousRandom;
  std::size_t n_init = 100;
  std::size_t n_updates = 1000;
  std::size_t dim = 2;
  double delete_fraction = 0.5;
  std::uint64_t seed = 1;
};

// Produces update streams, optionally reacting to the solution a clusterer
// exposes (the adaptive strategy deletes solution members to force recourse).
// Callers drive it step by step so generation can run in lockstep with the
// algorithm under test.
class StreamGenerator {
 public:
  using SolutionView = std::function<std::vector<PointId>()>;

  explicit StreamGenerator(const GeneratorConfig& cfg);

  // The n_init initial insertions (ids 0..n_init-1, uniform in [0,100]^dim).
  const std::vector<UpdateEvent>& initial_events() const { return initial_; }

  // Emits the next adversarial update. `solution` may be empty for oblivious
  // strategies; the adaptive strategy reads it every step.
  UpdateEvent next(const SolutionView& solution);

 private:
  UpdateEvent make_insert_uniform();
  UpdateEvent make_delete(PointId id);

  GeneratorConfig cfg_;
  std::mt19937_64 rng_;
  std::vector<UpdateEvent> initial_;
  std::vector<PointId> live_;  // sorted
  std::vector<std::vector<double>> coords_;  // by id
  PointId next_id_ = 0;
  std::uint64_t step_ = 0;

  // adaptive bookkeeping: first time each id was seen in the solution
  std::vector<std::int64_t> first_seen_;
  std::int64_t seen_serial_ = 0;

  // churn bookkeeping
  double diameter_ = 0.0;
  std::vector<double> diameter_stack_;
  std::optional<PointId> churn_pending_delete_;
  std::uint64_t churn_serial_ = 0;
};

}  // namespace dynkc
