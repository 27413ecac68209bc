#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "plex/core.hpp"
#include "plex/spline.hpp"

namespace plex {

// Flat prefix table over spline keys: offsets[p] is the index of the first
// spline point whose r-bit prefix is >= p, and offsets[2^r] == |S|.
struct RadixTableIndex {
  unsigned r = 1;
  KeyWidth width{};
  std::vector<std::uint32_t> offsets;

  static constexpr std::size_t kEntryBytes = sizeof(std::uint32_t);
  static constexpr unsigned kMaxBits = 32;

  static std::size_t bytes_for(unsigned r) { return ((std::size_t{1} << r) + 1) * kEntryBytes; }
  std::size_t size_in_bytes() const { return offsets.size() * kEntryBytes; }

  /// Spline-index range that contains the segment start for k. The bucket is
  /// widened by one to the left so the predecessor of the bucket is included.
  SearchBound lookup(Key k) const {
    const Key p = prefix(k > width.max_key() ? width.max_key() : k, r, width);
    std::uint64_t begin = offsets[p];
    const std::uint64_t end = offsets[p + 1];
    if (begin > 0) --begin;
    return {begin, end};
  }
};

RadixTableIndex build_radix_table(std::span<const SplinePoint> spline, unsigned r,
                                  KeyWidth width);

inline RadixTableIndex build_radix_table(const SplineModel& spline, unsigned r) {
  return build_radix_table(spline.points, r, spline.width);
}

// Streaming estimate of the average number of binary-search steps of a radix
// table for every r in [0, r_max], weighted by data keys:
//   lambda_r = (1/|D|) * sum over data keys k of ceil(log2(|bucket(k)|))
// where |bucket(k)| counts spline points sharing k's r-bit prefix.
// Data keys and spline points must be reported in non-decreasing key order.
class RadixCostTracker {
 public:
  explicit RadixCostTracker(unsigned r_max, KeyWidth width = KeyWidth{});

  void add_data_keys(Key k, std::uint64_t count = 1) {
    advance(k);
    data_total_ += count;
  }
  void add_spline_point(Key k) {
    advance(k);
    ++spline_total_;
  }

  /// Closes all open buckets. Further events are rejected.
  void finish();

  unsigned r_max() const { return r_max_; }
  std::uint64_t data_keys() const { return data_total_; }
  std::uint64_t spline_points() const { return spline_total_; }

  /// lambda_r for r in [0, r_max]; requires finish().
  double lambda(unsigned r) const;
  const std::vector<double>& lambdas() const;
  /// Numerator of lambda_r (integral cost sum).
  std::uint64_t cost_sum(unsigned r) const { return cost_sum_.at(r); }

 private:
  void advance(Key k) {
    if (started_ && k > last_key_ && k <= width_.max_key() && !finished_) [[likely]] {
      close_buckets(lcp(k, last_key_, width_) + 1);
      last_key_ = k;
      return;
    }
    advance_slow(k);
  }
  void advance_slow(Key k);
  void close_buckets(unsigned from_r) {
    for (unsigned r = from_r; r <= r_max_; ++r) {
      Bucket& b = open_[r];
      cost_sum_[r] += (data_total_ - b.data_start) * ceil_log2(spline_total_ - b.spline_start);
      b.data_start = data_total_;
      b.spline_start = spline_total_;
    }
  }

  struct Bucket {
    std::uint64_t data_start = 0;
    std::uint64_t spline_start = 0;
  };

  unsigned r_max_;
  KeyWidth width_;
  bool started_ = false;
  bool finished_ = false;
  Key last_key_ = 0;
  std::uint64_t data_total_ = 0;
  std::uint64_t spline_total_ = 0;
  std::vector<Bucket> open_;
  std::vector<std::uint64_t> cost_sum_;
  std::vector<double> lambda_;
};

/// Offline evaluation of the data-weighted cost from a built table.
double radix_table_cost(const RadixTableIndex& table, std::span<const Key> data);

}  // namespace plex
