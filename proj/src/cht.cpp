#include "plex/cht.hpp"

#include <stdexcept>

namespace plex {

CompactHistTree::CompactHistTree(ChtConfig config, std::uint64_t num_keys,
                                 std::vector<std::uint32_t> cells)
    : config_(config), num_keys_(num_keys), cells_(std::move(cells)) {
  if (config_.r < 1 || config_.r > 30) throw std::invalid_argument("cht radix bits out of range");
  const std::size_t fanout = std::size_t{1} << config_.r;
  if (cells_.empty() || cells_.size() % fanout != 0)
    throw std::invalid_argument("cht cell array is not a whole number of nodes");
  const std::size_t nodes = cells_.size() / fanout;
  // Children always live after their parent, which rules out cycles.
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const std::uint32_t cell = cells_[i];
    const bool ok = is_leaf(cell) ? (cell & kPayloadMask) <= num_keys_
                                  : cell > i / fanout && cell < nodes;
    if (!ok) throw std::invalid_argument("corrupt cht cell");
  }
}

unsigned CompactHistTree::child_hops(Key k) const {
  if (k > config_.width.max_key()) return 0;
  const unsigned r = config_.r;
  const Key fanout_mask = (Key{1} << r) - 1;
  std::size_t node = 0;
  unsigned remaining = config_.width.bits;
  unsigned hops = 0;
  for (;;) {
    const unsigned bits = remaining < r ? remaining : r;
    remaining -= bits;
    const Key digit = (k >> remaining) & (fanout_mask >> (r - bits));
    const std::uint32_t cell = cells_[(node << r) + digit];
    if (is_leaf(cell)) return hops;
    node = cell;
    ++hops;
  }
}

CompactHistTree build_cht(std::span<const Key> keys, ChtConfig config) {
  const unsigned r = config.r;
  const unsigned width = config.width.bits;
  if (r < 1 || r > width) throw std::invalid_argument("cht radix bits must be in [1, width]");
  if (r > 30) throw std::invalid_argument("cht radix bits too large");
  if (config.delta < 1) throw std::invalid_argument("cht delta must be >= 1");
  if (keys.size() > CompactHistTree::kPayloadMask) throw std::length_error("offset overflow");
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (!config.width.fits(keys[i])) throw std::invalid_argument("key does not fit key width");
    if (i > 0 && keys[i] <= keys[i - 1]) {
      throw std::invalid_argument(keys[i] == keys[i - 1] ? "cht does not support duplicate keys"
                                                         : "cht keys must be sorted");
    }
  }

  struct PendingNode {
    std::size_t begin;
    std::size_t end;
    unsigned remaining;  // bits not yet consumed above this node
  };

  const std::size_t fanout = std::size_t{1} << r;
  std::vector<std::uint32_t> cells;
  std::vector<PendingNode> level{{0, keys.size(), width}};
  std::vector<PendingNode> next_level;
  std::size_t node_count = 1;

  while (!level.empty()) {
    next_level.clear();
    for (const PendingNode& node : level) {
      const unsigned bits = node.remaining < r ? node.remaining : r;
      const unsigned child_remaining = node.remaining - bits;
      const std::size_t used = std::size_t{1} << bits;
      const std::size_t base = cells.size();
      cells.resize(base + fanout, CompactHistTree::kLeafFlag | static_cast<std::uint32_t>(node.end));

      std::size_t pos = node.begin;
      for (std::size_t digit = 0; digit < used; ++digit) {
        const std::size_t start = pos;
        while (pos < node.end && ((keys[pos] >> child_remaining) & (used - 1)) == digit) ++pos;
        const std::size_t count = pos - start;
        if (count > config.delta && child_remaining > 0) {
          cells[base + digit] = static_cast<std::uint32_t>(node_count++);
          next_level.push_back({start, pos, child_remaining});
        } else {
          cells[base + digit] = CompactHistTree::kLeafFlag | static_cast<std::uint32_t>(start);
        }
      }
    }
    level.swap(next_level);
  }
  return CompactHistTree(config, keys.size(), std::move(cells));
}

ChtStats cht_stats(const CompactHistTree& tree, std::span<const Key> keys) {
  ChtStats stats;
  stats.node_count = tree.node_count();
  stats.memory_bytes = tree.size_in_bytes();
  if (keys.empty()) return stats;
  std::uint64_t below_first = 0;
  std::uint64_t all = 0;
  for (Key k : keys) {
    const unsigned hops = tree.child_hops(k);
    all += hops;
    below_first += hops > 0 ? hops - 1 : 0;
  }
  stats.exact_avg_depth = static_cast<double>(below_first) / static_cast<double>(keys.size());
  stats.avg_child_hops = static_cast<double>(all) / static_cast<double>(keys.size());
  return stats;
}

}  // namespace plex
