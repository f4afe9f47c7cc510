#include "dynkc/assignment.hpp"

#include <algorithm>

namespace dynkc {

void Assignment::assign(PointId p, PointId c) {
  auto it = center_of_.find(p);
  if (it != center_of_.end()) {
    if (it->second == c) return;
    auto& old_list = members_[it->second];
    old_list.erase(std::find(old_list.begin(), old_list.end(), p));
    it->second = c;
  } else {
    center_of_.emplace(p, c);
  }
  members_[c].push_back(p);
}

void Assignment::erase(PointId p) {
  auto it = center_of_.find(p);
  if (it == center_of_.end()) return;
  auto& list = members_[it->second];
  list.erase(std::find(list.begin(), list.end(), p));
  if (list.empty()) members_.erase(it->second);
  center_of_.erase(it);
}

void Assignment::clear() {
  center_of_.clear();
  members_.clear();
}

std::vector<PointId> Assignment::preimage(PointId c) const {
  auto it = members_.find(c);
  if (it == members_.end()) return {};
  return it->second;
}

void Assignment::redirect(PointId from, PointId to) {
  if (from == to) return;
  auto it = members_.find(from);
  if (it == members_.end()) return;
  std::vector<PointId> moved = std::move(it->second);
  members_.erase(it);
  auto& dst = members_[to];
  for (PointId p : moved) {
    center_of_[p] = to;
    dst.push_back(p);
  }
}

}  // namespace dynkc
