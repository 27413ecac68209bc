#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "plex/core.hpp"

namespace plex {

struct ChtConfig {
  unsigned r = 1;
  std::uint32_t delta = 1;
  KeyWidth width{};
};

// Compact Hist-Tree: a read-only radix tree with fanout 2^r stored as a flat
// cell array. Node i occupies cells [i * 2^r, (i + 1) * 2^r). A cell either
// holds LEAF(start position) with the top bit set, or CHILD(node index).
// Bins holding at most delta keys are leaves, so a lookup for a stored key
// returns q with the key's position in [q, q + delta - 1].
class CompactHistTree {
 public:
  static constexpr std::uint32_t kLeafFlag = 0x80000000u;
  static constexpr std::uint32_t kPayloadMask = 0x7fffffffu;
  static constexpr std::size_t kCellBytes = sizeof(std::uint32_t);

  CompactHistTree() = default;
  CompactHistTree(ChtConfig config, std::uint64_t num_keys, std::vector<std::uint32_t> cells);

  const ChtConfig& config() const { return config_; }
  std::uint64_t num_keys() const { return num_keys_; }
  const std::vector<std::uint32_t>& cells() const { return cells_; }
  std::size_t node_count() const { return cells_.size() >> config_.r; }
  std::size_t size_in_bytes() const { return cells_.size() * kCellBytes; }

  static bool is_leaf(std::uint32_t cell) { return (cell & kLeafFlag) != 0; }

  /// Estimated position q of k among the indexed keys.
  std::uint32_t lookup(Key k) const {
    if (k > config_.width.max_key()) return static_cast<std::uint32_t>(num_keys_);
    const unsigned r = config_.r;
    const Key fanout_mask = (Key{1} << r) - 1;
    std::size_t node = 0;
    unsigned remaining = config_.width.bits;
    for (;;) {
      const unsigned bits = remaining < r ? remaining : r;
      remaining -= bits;
      const Key digit = (k >> remaining) & (fanout_mask >> (r - bits));
      const std::uint32_t cell = cells_[(node << r) + digit];
      if (is_leaf(cell)) return cell & kPayloadMask;
      node = cell;
    }
  }

  /// Number of CHILD cells followed when looking up k.
  unsigned child_hops(Key k) const;

  /// Spline-index range containing the segment start for k: the leaf bin
  /// [q, q + delta) widened by one to the left.
  SearchBound search_bound(Key k) const {
    std::uint64_t begin = lookup(k);
    const std::uint64_t end = std::min<std::uint64_t>(begin + config_.delta, num_keys_);
    if (begin > 0) --begin;
    return {begin, end < begin ? begin : end};
  }

 private:
  ChtConfig config_{};
  std::uint64_t num_keys_ = 0;
  std::vector<std::uint32_t> cells_;
};

/// Level-by-level construction over sorted, distinct keys.
CompactHistTree build_cht(std::span<const Key> keys, ChtConfig config);

struct ChtStats {
  std::size_t node_count = 0;
  std::size_t memory_bytes = 0;
  // Mean over indexed keys of max(child_hops - 1, 0): the descent out of the
  // root is not charged.
  double exact_avg_depth = 0;
  // Mean over indexed keys of child_hops: every non-final bin is charged.
  double avg_child_hops = 0;
};

ChtStats cht_stats(const CompactHistTree& tree, std::span<const Key> keys);

}  // namespace plex
