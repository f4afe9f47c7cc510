#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>
#include <string>

namespace dynkc {

using PointId = std::uint64_t;
using PointSet = std::set<PointId>;

// Thrown on malformed input (streams, matrices, CLI arguments).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Thrown on semantically invalid input or configuration.
class ValidationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when an internal invariant is violated. Always fatal; never caught by the library.
class InternalError : public std::logic_error {
  using std::logic_error::logic_error;
};

// Always-on internal invariant check (independent of NDEBUG).
#define DYNKC_CHECK(cond, msg)                                        \
  do {                                                                \
    if (!(cond)) throw ::dynkc::InternalError(std::string("internal invariant violated: ") + (msg)); \
  } while (0)

enum class Sampler { kIndependent, kRepeated2k };

// Shared knobs for every clusterer. Fields map one-to-one onto CLI flags.
struct Params {
  int k = 8;
  double alpha = 4.0;    // oversampling factor of the level samples
  double beta = 0.1;     // fraction of the working set a level must cover
  double gamma = 0.5;    // quantile used by the radius lower-bound oracle
  double lambda = 0.02;  // staleness threshold and lazy-sync rate
  double epsilon = 0.01; // slack of the budgeted rebuilders
  double delta = 0.5;    // radius ladder step for the exact-size clusterer
  double c_work = 1.0;   // scale of the per-update work budget
  int c_trials = 3;      // rounds of the repeated 2k-subset sampler
  double rho = 3.0;      // size constant of the budgeted solution, checked at runtime
  double ratio_max = 16.0;
  Sampler sampler = Sampler::kIndependent;
  std::uint64_t seed = 1;

  void validate() const {
    if (k < 1) throw ValidationError("k must be at least 1");
    if (alpha < 1.0) throw ValidationError("alpha must be at least 1");
    if (!(beta > 0.0 && beta < 1.0)) throw ValidationError("beta must be in (0,1)");
    if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
    if (!(beta - epsilon > 0.0)) throw ValidationError("beta must exceed epsilon");
    if (!(1.0 - beta + 5.0 * epsilon < 1.0))
      throw ValidationError("beta must exceed 5*epsilon");
    if (!(lambda > 0.0)) throw ValidationError("lambda must be positive");
    if (!(lambda + epsilon < 1.0 / 6.0))
      throw ValidationError("lambda + epsilon must be below 1/6");
    if (!(gamma > 0.0 && gamma < 1.0 - 6.0 * (lambda + epsilon)))
      throw ValidationError("gamma must be in (0, 1 - 6*(lambda+epsilon))");
    if (!(delta > 0.0)) throw ValidationError("delta must be positive");
    if (c_work <= 0.0) throw ValidationError("c_work must be positive");
    if (c_trials < 1) throw ValidationError("c_trials must be at least 1");
    if (rho < 1.0) throw ValidationError("rho must be at least 1");
    if (ratio_max < 1.0) throw ValidationError("ratio_max must be at least 1");
  }
};

// log2 of n, with log2(n/k) floored at 1 wherever a level-count term appears.
inline double log2n(std::size_t n) { return n < 2 ? 0.0 : std::log2(static_cast<double>(n)); }

inline double log2nk(std::size_t n, int k) {
  if (n == 0) return 1.0;
  double v = std::log2(static_cast<double>(n) / static_cast<double>(k));
  return v < 1.0 ? 1.0 : v;
}

// Size threshold below which a working set becomes a terminal level.
inline double level_threshold(const Params& p, std::size_t n) {
  return p.alpha * p.k * log2n(n) * log2nk(n, p.k);
}

// Upper bound on the number of levels of any stack built over n points.  The
// log term turns negative once n drops below k/2, but a stack still carries
// its terminal level there, so the bound never falls under 2.
inline double max_levels(const Params& p, std::size_t n) {
  if (n < 2) return 2.0;
  double shrink = -std::log2(1.0 - p.beta + 5.0 * p.epsilon);
  return std::max(2.0, 2.0 + std::log2(2.0 * static_cast<double>(n) / p.k) / shrink);
}

// Work units one budgeted rebuilder may spend per adversarial update.
inline std::uint64_t units_per_update(const Params& p, std::size_t n) {
  double u = p.c_work * (p.alpha * p.k / p.epsilon) * log2n(n) * log2nk(n, p.k);
  double c = std::ceil(u);
  return c < 1.0 ? 1 : static_cast<std::uint64_t>(c);
}

inline std::uint64_t sync_steps_per_update(const Params& p, double rho_scale = 1.0) {
  return static_cast<std::uint64_t>(std::ceil(32.0 * rho_scale / (p.lambda * p.lambda)));
}

// splitmix64; used to derive independent seeds for per-level generators.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_tag) {
  return mix_seed(master ^ mix_seed(stream_tag));
}

// Uniform helpers with pinned behaviour (std::uniform_*_distribution is
// implementation-defined, which would break cross-platform determinism).
inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t bound) {
  DYNKC_CHECK(bound > 0, "uniform_index bound must be positive");
  std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % bound;
}

inline double uniform_real(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace dynkc
