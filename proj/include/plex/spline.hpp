#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "plex/core.hpp"

namespace plex {

using SplinePoint = CdfPoint;

// Error-bounded linear spline over the CDF. For every distinct key k of the
// data, interpolating inside the segment containing k lands within epsilon
// positions of k's first occurrence.
struct SplineModel {
  std::vector<SplinePoint> points;
  std::uint64_t epsilon = 1;
  std::uint64_t num_keys = 0;
  KeyWidth width{};

  std::size_t size() const { return points.size(); }
  std::size_t size_in_bytes() const { return points.size() * sizeof(SplinePoint); }

  /// Estimated position of k inside segment [points[segment], points[segment + 1]].
  std::uint64_t interpolate(std::size_t segment, Key k) const;

  /// Index of the last spline point with key <= k, searching only
  /// [range_start, range_start + range_len). Clamped to [0, size() - 2].
  std::size_t segment_search(std::size_t range_start, std::size_t range_len, Key k) const;
};

// Greedy corridor spline builder. Consumes CDF points in key order with O(1)
// state; points are emitted with a delay of one CDF point.
class SplineBuilder {
 public:
  SplineBuilder(std::uint64_t epsilon, KeyWidth width = KeyWidth{});

  /// Feeds the next CDF point. Returns the spline point emitted by this call,
  /// if any; it is always at or before the previously added point.
  std::optional<SplinePoint> add(CdfPoint p) {
    if (corridor_open_ && !flushed_ && p.key > prev_->key && p.position > prev_->position && width_.fits(p.key))
        [[likely]] {
      const SplinePoint& base = points_.back();
      const auto dx = static_cast<double>(p.key - base.key);
      const double y = static_cast<double>(p.position) - static_cast<double>(base.position);
      const double slope = y / dx;
      if (slope >= lower_slope_ && slope <= upper_slope_) {
        const double eps = static_cast<double>(epsilon_);
        upper_slope_ = std::min(upper_slope_, (y + eps) / dx);
        lower_slope_ = std::max(lower_slope_, (y - eps) / dx);
        prev_ = p;
        return std::nullopt;
      }
    }
    return add_slow(p);
  }

  /// Emits the last CDF point if it is not yet part of the spline.
  std::optional<SplinePoint> flush();

  /// Flushes and hands over the model.
  SplineModel finish(std::uint64_t num_keys);

  const std::vector<SplinePoint>& points() const { return points_; }

 private:
  std::optional<SplinePoint> add_slow(CdfPoint p);

  std::uint64_t epsilon_;
  KeyWidth width_;
  std::vector<SplinePoint> points_;
  std::optional<CdfPoint> prev_;
  double lower_slope_ = 0;
  double upper_slope_ = 0;
  bool corridor_open_ = false;
  bool flushed_ = false;
};

/// Builds the spline from a complete CDF.
SplineModel build_spline(std::span<const CdfPoint> cdf, std::uint64_t epsilon,
                         std::uint64_t num_keys, KeyWidth width = KeyWidth{});

/// Spline over a sorted key array (duplicates collapse to their first occurrence).
SplineModel build_spline(std::span<const Key> sorted_keys, std::uint64_t epsilon,
                         KeyWidth width = KeyWidth{});

}  // namespace plex
