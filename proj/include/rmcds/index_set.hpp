#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "rmcds/types.hpp"

namespace rmcds {

/// Sorted, duplicate-free set of (row, col) grid positions. Masks and
/// supports are stored this way so sparse sets stay O(|set|) to apply.
class IndexSet {
 public:
  using Pair = std::pair<std::int32_t, std::int32_t>;

  IndexSet() = default;

  /// Sorts and removes duplicates.
  static IndexSet from_pairs(std::vector<Pair> pairs) {
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    IndexSet s;
    s.pairs_ = std::move(pairs);
    return s;
  }

  static IndexSet full_grid(Index n) {
    IndexSet s;
    s.pairs_.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    for (std::int32_t i = 0; i < n; ++i)
      for (std::int32_t j = 0; j < n; ++j) s.pairs_.emplace_back(i, j);
    return s;
  }

  bool contains(std::int32_t i, std::int32_t j) const {
    return std::binary_search(pairs_.begin(), pairs_.end(), Pair{i, j});
  }

  Index size() const { return static_cast<Index>(pairs_.size()); }
  bool empty() const { return pairs_.empty(); }
  const std::vector<Pair>& pairs() const { return pairs_; }

  IndexSet set_union(const IndexSet& other) const {
    std::vector<Pair> out;
    out.reserve(pairs_.size() + other.pairs_.size());
    std::set_union(pairs_.begin(), pairs_.end(), other.pairs_.begin(),
                   other.pairs_.end(), std::back_inserter(out));
    IndexSet s;
    s.pairs_ = std::move(out);
    return s;
  }

  IndexSet set_intersection(const IndexSet& other) const {
    std::vector<Pair> out;
    std::set_intersection(pairs_.begin(), pairs_.end(), other.pairs_.begin(),
                          other.pairs_.end(), std::back_inserter(out));
    IndexSet s;
    s.pairs_ = std::move(out);
    return s;
  }

  IndexSet set_difference(const IndexSet& other) const {
    std::vector<Pair> out;
    std::set_difference(pairs_.begin(), pairs_.end(), other.pairs_.begin(),
                        other.pairs_.end(), std::back_inserter(out));
    IndexSet s;
    s.pairs_ = std::move(out);
    return s;
  }

  /// All grid positions of an n-by-n grid not in this set.
  IndexSet complement(Index n) const { return full_grid(n).set_difference(*this); }

  bool operator==(const IndexSet& other) const = default;

 private:
  std::vector<Pair> pairs_;  // sorted, unique
};

}  // namespace rmcds
