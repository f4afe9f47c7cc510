#pragma once

#include <cstddef>
#include <unordered_map>
#include <vector>

#include "dynkc/types.hpp"

namespace dynkc {

// Binary min-heap over (key, id) pairs with O(1) key lookup by id.
// Ties break toward the smaller id so min() is deterministic.
class IndexedMinHeap {
 public:
  struct Entry {
    double key = 0.0;
    PointId id = 0;
  };

  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  bool contains(PointId id) const { return pos_.count(id) != 0; }

  double key_of(PointId id) const {
    auto it = pos_.find(id);
    DYNKC_CHECK(it != pos_.end(), "key_of on an id not in the heap");
    return heap_[it->second].key;
  }

  Entry min() const {
    DYNKC_CHECK(!heap_.empty(), "min of an empty heap");
    return heap_[0];
  }

  void insert(PointId id, double key) {
    DYNKC_CHECK(!contains(id), "insert of an id already in the heap");
    heap_.push_back({key, id});
    pos_[id] = heap_.size() - 1;
    sift_up(heap_.size() - 1);
  }

  void update(PointId id, double key) {
    auto it = pos_.find(id);
    DYNKC_CHECK(it != pos_.end(), "update of an id not in the heap");
    std::size_t i = it->second;
    double old = heap_[i].key;
    heap_[i].key = key;
    if (key < old)
      sift_up(i);
    else
      sift_down(i);
  }

  void upsert(PointId id, double key) {
    if (contains(id))
      update(id, key);
    else
      insert(id, key);
  }

  bool erase(PointId id) {
    auto it = pos_.find(id);
    if (it == pos_.end()) return false;
    std::size_t i = it->second;
    pos_.erase(it);
    std::size_t last = heap_.size() - 1;
    if (i != last) {
      heap_[i] = heap_[last];
      pos_[heap_[i].id] = i;
      heap_.pop_back();
      if (i > 0 && less(heap_[i], heap_[parent(i)]))
        sift_up(i);
      else
        sift_down(i);
    } else {
      heap_.pop_back();
    }
    return true;
  }

  void clear() {
    heap_.clear();
    pos_.clear();
  }

 private:
  static std::size_t parent(std::size_t i) { return (i - 1) / 2; }

  static bool less(const Entry& a, const Entry& b) {
    if (a.key != b.key) return a.key < b.key;
    return a.id < b.id;
  }

  void sift_up(std::size_t i) {
    while (i > 0 && less(heap_[i], heap_[parent(i)])) {
      swap_at(i, parent(i));
      i = parent(i);
    }
  }

  void sift_down(std::size_t i) {
    for (;;) {
      std::size_t l = 2 * i + 1, r = 2 * i + 2, best = i;
      if (l < heap_.size() && less(heap_[l], heap_[best])) best = l;
      if (r < heap_.size() && less(heap_[r], heap_[best])) best = r;
      if (best == i) return;
      swap_at(i, best);
      i = best;
    }
  }

  void swap_at(std::size_t a, std::size_t b) {
    std::swap(heap_[a], heap_[b]);
    pos_[heap_[a].id] = a;
    pos_[heap_[b].id] = b;
  }

  std::vector<Entry> heap_;
  std::unordered_map<PointId, std::size_t> pos_;
};

}  // namespace dynkc
