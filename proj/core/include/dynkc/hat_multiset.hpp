#pragma once

#include <algorithm>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dynkc/types.hpp"

namespace dynkc {

// Multiset of solution points with per-update change metering and optional
// support-transition capture (used to feed downstream consumers that only see
// distinct points).
class HatMultiset {
 public:
  void add(PointId p) {
    auto& c = counts_[p];
    if (c == 0) support_delta_.push_back({p, true});
    ++c;
    ++card_;
    ++delta_[p];
  }

  // Removes one copy; returns false (and does nothing) if p is absent.
  bool remove_one(PointId p) {
    auto it = counts_.find(p);
    if (it == counts_.end()) return false;
    if (--it->second == 0) {
      counts_.erase(it);
      support_delta_.push_back({p, false});
    }
    --card_;
    --delta_[p];
    return true;
  }

  // Removes every copy of p; returns how many were removed.
  std::uint32_t remove_all(PointId p) {
    auto it = counts_.find(p);
    if (it == counts_.end()) return 0;
    std::uint32_t c = it->second;
    counts_.erase(it);
    support_delta_.push_back({p, false});
    card_ -= c;
    delta_[p] -= static_cast<std::int64_t>(c);
    return c;
  }

  std::uint32_t count(PointId p) const {
    auto it = counts_.find(p);
    return it == counts_.end() ? 0 : it->second;
  }
  bool contains(PointId p) const { return counts_.count(p) != 0; }
  std::size_t support_size() const { return counts_.size(); }
  std::size_t cardinality() const { return card_; }

  std::vector<PointId> support_sorted() const {
    std::vector<PointId> out;
    out.reserve(counts_.size());
    for (const auto& [p, c] : counts_) out.push_back(p);
    std::sort(out.begin(), out.end());
    return out;
  }

  const std::unordered_map<PointId, std::uint32_t>& counts() const { return counts_; }

  // Count-wise symmetric difference accumulated since the last call.
  std::uint64_t take_recourse() {
    std::uint64_t r = 0;
    for (const auto& [p, d] : delta_) r += static_cast<std::uint64_t>(d < 0 ? -d : d);
    delta_.clear();
    return r;
  }

  // Support enter/leave events since the last call, in occurrence order.
  // An id can appear multiple times (left then re-entered); consumers fold.
  std::vector<std::pair<PointId, bool>> take_support_delta() {
    return std::exchange(support_delta_, {});
  }

 private:
  std::unordered_map<PointId, std::uint32_t> counts_;
  std::size_t card_ = 0;
  std::unordered_map<PointId, std::int64_t> delta_;
  std::vector<std::pair<PointId, bool>> support_delta_;
};

}  // namespace dynkc
