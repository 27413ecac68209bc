#include "plex/radix_table.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace plex {

RadixTableIndex build_radix_table(std::span<const SplinePoint> spline, unsigned r,
                                  KeyWidth width) {
  if (r < 1 || r > width.bits) throw std::invalid_argument("radix bits must be in [1, width]");
  if (r > RadixTableIndex::kMaxBits) throw std::invalid_argument("radix table too large");
  if (spline.size() >= (std::size_t{1} << 31)) throw std::length_error("offset overflow");

  RadixTableIndex table;
  table.r = r;
  table.width = width;
  const std::size_t buckets = std::size_t{1} << r;
  table.offsets.assign(buckets + 1, 0);

  // offsets[p] = first spline index whose prefix is >= p.
  std::size_t next_bucket = 0;
  for (std::size_t i = 0; i < spline.size(); ++i) {
    const Key p = prefix(spline[i].key, r, width);
    while (next_bucket <= p) table.offsets[next_bucket++] = static_cast<std::uint32_t>(i);
  }
  while (next_bucket <= buckets)
    table.offsets[next_bucket++] = static_cast<std::uint32_t>(spline.size());
  return table;
}

RadixCostTracker::RadixCostTracker(unsigned r_max, KeyWidth width)
    : r_max_(std::min(r_max, width.bits)),
      width_(width),
      open_(r_max_ + 1),
      cost_sum_(r_max_ + 1, 0) {}

void RadixCostTracker::advance_slow(Key k) {
  if (finished_) throw std::logic_error("cost tracker already finished");
  if (!width_.fits(k)) throw std::invalid_argument("key does not fit key width");
  if (!started_) {
    started_ = true;
    last_key_ = k;
    return;
  }
  if (k < last_key_) throw std::invalid_argument("cost tracker events out of key order");
  // k == last_key_: same bucket at every r.
}

void RadixCostTracker::finish() {
  if (finished_) return;
  finished_ = true;
  for (unsigned r = 0; r <= r_max_; ++r) {
    const Bucket& b = open_[r];
    cost_sum_[r] += (data_total_ - b.data_start) * ceil_log2(spline_total_ - b.spline_start);
  }
  lambda_.assign(r_max_ + 1, 0.0);
  if (data_total_ == 0) return;
  for (unsigned r = 0; r <= r_max_; ++r)
    lambda_[r] = static_cast<double>(cost_sum_[r]) / static_cast<double>(data_total_);
}

double RadixCostTracker::lambda(unsigned r) const {
  return lambdas().at(r);
}

const std::vector<double>& RadixCostTracker::lambdas() const {
  if (!finished_) throw std::logic_error("cost tracker not finished");
  return lambda_;
}

double radix_table_cost(const RadixTableIndex& table, std::span<const Key> data) {
  if (data.empty()) return 0.0;
  std::uint64_t sum = 0;
  for (Key k : data) {
    const Key p = prefix(k, table.r, table.width);
    sum += ceil_log2(table.offsets[p + 1] - table.offsets[p]);
  }
  return static_cast<double>(sum) / static_cast<double>(data.size());
}

}  // namespace plex
