#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <vector>

#include "dynkc/types.hpp"

namespace dynkc {

// Point universe plus distance access. Points are either rows of an explicit
// distance matrix or Euclidean coordinate vectors; ids are never reused, and
// coordinates are retained after deletion so distances to past points stay
// well defined (rebuild snapshots may still refer to them).
class MetricSpace {
 public:
  // Euclidean mode. dim 0 means "fixed by the first inserted point".
  explicit MetricSpace(std::size_t dim = 0) : dim_(dim) {}

  // Matrix mode: n*n symmetric matrix with zero diagonal satisfying the
  // triangle inequality. Validation is O(n^3).
  static MetricSpace from_matrix(std::vector<std::vector<double>> matrix);

  // Movable so factories can return by value; algorithms hold references, so
  // never move a space that already has an engine attached.
  MetricSpace(MetricSpace&& o) noexcept
      : dim_(o.dim_),
        matrix_(std::move(o.matrix_)),
        coords_(std::move(o.coords_)),
        live_(std::move(o.live_)),
        has_point_(std::move(o.has_point_)),
        live_count_(o.live_count_),
        evals_(o.evals_.load(std::memory_order_relaxed)) {}
  MetricSpace& operator=(MetricSpace&&) = delete;

  bool matrix_mode() const { return !matrix_.empty(); }
  std::size_t dim() const { return dim_; }

  // Registers a point. In matrix mode id must index a matrix row and coords
  // must be empty. Re-inserting a previously seen id is an error.
  void add_point(PointId id, const std::vector<double>& coords);
  void remove_point(PointId id);

  bool is_live(PointId id) const {
    return id < live_.size() && live_[id];
  }
  bool known(PointId id) const { return id < live_.size() && has_point_[id]; }
  std::size_t live_count() const { return live_count_; }
  const std::vector<double>& coords(PointId id) const;

  double dist(PointId a, PointId b) const;

  std::uint64_t evals() const { return evals_.load(std::memory_order_relaxed); }
  void reset_evals() { evals_.store(0, std::memory_order_relaxed); }

 private:
  std::size_t dim_ = 0;
  std::vector<std::vector<double>> matrix_;
  std::vector<std::vector<double>> coords_;  // indexed by id, euclidean mode
  std::vector<char> live_;
  std::vector<char> has_point_;
  std::size_t live_count_ = 0;
  mutable std::atomic<std::uint64_t> evals_{0};
};

// Distance from p to the nearest member of S together with that member.
// Ties go to the smaller id. S empty yields +inf and no witness.
struct NearestResult {
  double dist;
  std::optional<PointId> witness;
};

template <typename Range>
NearestResult dist_to_set(const MetricSpace& m, PointId p, const Range& S) {
  NearestResult r{std::numeric_limits<double>::infinity(), std::nullopt};
  for (PointId q : S) {
    double d = m.dist(p, q);
    if (d < r.dist || (d == r.dist && r.witness && q < *r.witness)) {
      r.dist = d;
      r.witness = q;
    }
  }
  return r;
}

// Members of U within distance r of S. closed=true uses <=, closed=false <.
template <typename RangeU, typename RangeS>
std::vector<PointId> ball(const MetricSpace& m, const RangeU& U, const RangeS& S, double r,
                          bool closed = true) {
  std::vector<PointId> out;
  for (PointId p : U) {
    double d = dist_to_set(m, p, S).dist;
    if (closed ? d <= r : d < r) out.push_back(p);
  }
  return out;
}

}  // namespace dynkc
