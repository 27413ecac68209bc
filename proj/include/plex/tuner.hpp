#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "plex/core.hpp"

namespace plex {

class RadixCostTracker;

inline constexpr unsigned kDefaultMaxRadixBits = 20;
inline constexpr std::uint32_t kDefaultMaxDelta = 1024;

// values[i] = lcp(keys[i + 1], keys[i]) for consecutive distinct keys.
struct LcpHistogram {
  std::vector<std::uint8_t> values;
  KeyWidth width{};
  std::size_t num_keys = 0;
};

LcpHistogram build_lcp_histogram(std::span<const Key> keys, KeyWidth width = KeyWidth{});

// Predicted average search steps, depth sums and memory for every CHT(r, delta)
// with 1 <= r <= r_max and 1 <= delta <= delta_max.
class CostSurface {
 public:
  CostSurface() = default;
  CostSurface(unsigned r_max, std::uint32_t delta_max, std::size_t num_keys);

  unsigned r_max() const { return r_max_; }
  std::uint32_t delta_max() const { return delta_max_; }
  std::size_t num_keys() const { return num_keys_; }

  double lambda(unsigned r, std::uint32_t delta) const { return lambda_[index(r, delta)]; }
  std::uint64_t depth_sum(unsigned r, std::uint32_t delta) const { return depth_[index(r, delta)]; }
  std::uint64_t node_count(unsigned r, std::uint32_t delta) const { return nodes_[index(r, delta)]; }
  std::uint64_t bytes(unsigned r, std::uint32_t delta) const;

  /// Number of intervals alive at lcp-length p (p >= 1).
  const std::vector<std::size_t>& interval_counts() const { return interval_counts_; }

 private:
  friend CostSurface compute_cost_surface(const LcpHistogram&, unsigned, std::uint32_t);

  std::size_t index(unsigned r, std::uint32_t delta) const {
    return static_cast<std::size_t>(r - 1) * delta_max_ + (delta - 1);
  }

  unsigned r_max_ = 0;
  std::uint32_t delta_max_ = 0;
  std::size_t num_keys_ = 0;
  std::vector<double> lambda_;
  std::vector<std::uint64_t> depth_;
  std::vector<std::uint64_t> nodes_;
  std::vector<std::size_t> interval_counts_;
};

/// Interval-splitting pass over the lcp histogram (one sweep per lcp-length,
/// suffix sums over delta at the end).
CostSurface compute_cost_surface(const LcpHistogram& hist, unsigned r_max, std::uint32_t delta_max);

struct ChtMemoryEstimate {
  std::uint64_t node_count = 0;
  std::uint64_t bytes = 0;
};

ChtMemoryEstimate estimate_cht_memory(const LcpHistogram& hist, unsigned r, std::uint32_t delta,
                                      std::size_t cell_bytes = 4);

enum class SubindexKind : std::uint8_t { BinarySearchOnly = 0, RadixTable = 1, Cht = 2 };

std::string to_string(SubindexKind kind);

struct TunerChoice {
  SubindexKind kind = SubindexKind::BinarySearchOnly;
  unsigned r = 0;
  std::uint32_t delta = 0;
  double predicted_lambda = 0;
  std::uint64_t predicted_bytes = 0;

  friend bool operator==(const TunerChoice&, const TunerChoice&) = default;
};

/// Cheapest predicted subindex whose memory fits in spline_bytes.
TunerChoice select_subindex(const CostSurface& surface, const RadixCostTracker& radix,
                            std::uint64_t spline_bytes);

}  // namespace plex
