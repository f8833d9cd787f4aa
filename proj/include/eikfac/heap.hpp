#pragma once

#include <cassert>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace eikfac {

/// Binary min-heap over item ids 0..capacity-1 with decrease-key. Equal keys
/// order by smaller id.
class IndexedMinHeap {
 public:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  explicit IndexedMinHeap(std::size_t capacity) : pos_(capacity, kNone) {}

  bool empty() const { return items_.empty(); }
  std::size_t size() const { return items_.size(); }
  bool contains(std::size_t id) const { return pos_[id] != kNone; }
  double key(std::size_t id) const { return items_[pos_[id]].key; }

  /// Insert id, or lower its key. Larger keys for present ids are ignored.
  void push_or_decrease(std::size_t id, double key) {
    if (pos_[id] == kNone) {
      pos_[id] = items_.size();
      items_.push_back({key, id});
      sift_up(items_.size() - 1);
    } else if (key < items_[pos_[id]].key) {
      items_[pos_[id]].key = key;
      sift_up(pos_[id]);
    }
  }

  std::pair<std::size_t, double> top() const {
    return {items_.front().id, items_.front().key};
  }

  std::pair<std::size_t, double> pop() {
    assert(!items_.empty());
    const Item top = items_.front();
    pos_[top.id] = kNone;
    const Item last = items_.back();
    items_.pop_back();
    if (!items_.empty()) {
      items_.front() = last;
      pos_[last.id] = 0;
      sift_down(0);
    }
    return {top.id, top.key};
  }

 private:
  struct Item {
    double key;
    std::size_t id;
  };

  static bool before(const Item& a, const Item& b) {
    return a.key < b.key || (a.key == b.key && a.id < b.id);
  }

  void place(std::size_t slot, const Item& it) {
    items_[slot] = it;
    pos_[it.id] = slot;
  }

  void sift_up(std::size_t slot) {
    const Item it = items_[slot];
    while (slot > 0) {
      const std::size_t parent = (slot - 1) / 2;
      if (!before(it, items_[parent])) break;
      place(slot, items_[parent]);
      slot = parent;
    }
    place(slot, it);
  }

  void sift_down(std::size_t slot) {
    const Item it = items_[slot];
    const std::size_t n = items_.size();
    for (;;) {
      std::size_t child = 2 * slot + 1;
      if (child >= n) break;
      if (child + 1 < n && before(items_[child + 1], items_[child])) ++child;
      if (!before(items_[child], it)) break;
      place(slot, items_[child]);
      slot = child;
    }
    place(slot, it);
  }

  std::vector<Item> items_;
  std::vector<std::size_t> pos_;
};

}  // namespace eikfac
