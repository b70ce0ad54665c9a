// Copyright (c) 2026 The psnet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PSNET_TOPK_HPP_
#define PSNET_TOPK_HPP_

#include <algorithm>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "psnet/core.hpp"

namespace psnet {

/// Keeps the `capacity` best (key, index) pairs seen so far, where smaller key
/// is better and equal keys prefer the smaller index. Bounded max-heap, so a
/// full pass over m candidates costs O(m log n) and most candidates are
/// rejected by a single comparison against the current worst key.
class TopSelector {
 public:
  struct Entry {
    double key;
    Index index;
  };

  explicit TopSelector(std::size_t capacity) : capacity_(capacity) { heap_.reserve(capacity); }

  static bool better(const Entry& a, const Entry& b) {
    return a.key < b.key || (a.key == b.key && a.index < b.index);
  }

  /// Key every candidate must beat; +inf until the heap is full.
  double threshold() const noexcept { return threshold_; }
  bool full() const noexcept { return heap_.size() == capacity_; }

  void offer(double key, Index index) {
    const Entry e{key, index};
    if (heap_.size() < capacity_) {
      heap_.push_back(e);
      std::push_heap(heap_.begin(), heap_.end(), better);
      if (full()) threshold_ = heap_.front().key;
      return;
    }
    if (capacity_ == 0 || !better(e, heap_.front())) return;
    std::pop_heap(heap_.begin(), heap_.end(), better);
    heap_.back() = e;
    std::push_heap(heap_.begin(), heap_.end(), better);
    threshold_ = heap_.front().key;
  }

  void merge(const TopSelector& other) {
    for (const Entry& e : other.heap_) offer(e.key, e.index);
  }

  /// Entries best-first. Leaves the selector empty.
  std::vector<Entry> take_sorted() {
    std::sort_heap(heap_.begin(), heap_.end(), better);
    std::vector<Entry> out;
    out.swap(heap_);
    threshold_ = std::numeric_limits<double>::infinity();
    return out;
  }

 private:
  std::size_t capacity_;
  std::vector<Entry> heap_;
  double threshold_ = std::numeric_limits<double>::infinity();
};

}  // namespace psnet

#endif  // PSNET_TOPK_HPP_
