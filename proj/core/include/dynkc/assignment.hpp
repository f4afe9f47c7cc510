#pragma once

#include <optional>
#include <unordered_map>
#include <vector>

#include "dynkc/types.hpp"

namespace dynkc {

// Point-to-center map with explicit per-center member lists, so preimage
// queries during center replacement are O(cluster) instead of a full scan.
class Assignment {
 public:
  void assign(PointId p, PointId c);
  void erase(PointId p);
  void clear();

  std::optional<PointId> center_of(PointId p) const {
    auto it = center_of_.find(p);
    if (it == center_of_.end()) return std::nullopt;
    return it->second;
  }
  bool contains(PointId p) const { return center_of_.count(p) != 0; }
  std::size_t size() const { return center_of_.size(); }
  bool empty() const { return center_of_.empty(); }

  // Points currently mapped to c (including c itself when self-assigned).
  std::vector<PointId> preimage(PointId c) const;

  // Reroutes every member of `from` to `to`, in one splice.
  void redirect(PointId from, PointId to);

  const std::unordered_map<PointId, PointId>& raw() const { return center_of_; }

  // Content equality of the underlying map (member lists are derived).
  bool operator==(const Assignment& o) const { return center_of_ == o.center_of_; }

 private:
  std::unordered_map<PointId, PointId> center_of_;
  std::unordered_map<PointId, std::vector<PointId>> members_;
};

}  // namespace dynkc
