#include "plex/spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace plex {

std::uint64_t SplineModel::interpolate(std::size_t segment, Key k) const {
  if (points.empty()) throw std::out_of_range("interpolate on empty spline");
  if (points.size() == 1) {
    if (segment != 0) throw std::out_of_range("segment index out of range");
    return points[0].position;
  }
  if (segment + 1 >= points.size()) throw std::out_of_range("segment index out of range");

  const SplinePoint& a = points[segment];
  const SplinePoint& b = points[segment + 1];
  if (k <= a.key) return a.position;
  if (k >= b.key) return b.position;

  const double fraction = static_cast<double>(k - a.key) / static_cast<double>(b.key - a.key);
  const double estimate =
      static_cast<double>(a.position) + fraction * static_cast<double>(b.position - a.position);
  const auto rounded = static_cast<std::uint64_t>(std::floor(estimate + 0.5));
  return std::clamp(rounded, a.position, b.position);
}

std::size_t SplineModel::segment_search(std::size_t range_start, std::size_t range_len,
                                        Key k) const {
  if (points.size() <= 1) return 0;
  const std::size_t last_segment = points.size() - 2;
  range_start = std::min(range_start, points.size());
  range_len = std::min(range_len, points.size() - range_start);

  // Branch-light lower-bound style search for the last point with key <= k.
  std::size_t base = range_start;
  std::size_t len = range_len;
  if (len == 0 || points[base].key > k) return std::min(range_start, last_segment);
  while (len > 1) {
    const std::size_t half = len / 2;
    if (points[base + half].key <= k) base += half;
    len -= half;
  }
  return std::min(base, last_segment);
}

SplineBuilder::SplineBuilder(std::uint64_t epsilon, KeyWidth width)
    : epsilon_(epsilon), width_(width) {
  if (epsilon_ < 1) throw std::invalid_argument("epsilon must be >= 1");
}

std::optional<SplinePoint> SplineBuilder::add_slow(CdfPoint p) {
  if (flushed_) throw std::logic_error("spline builder already flushed");
  if (!width_.fits(p.key)) throw std::invalid_argument("key does not fit key width");

  if (!prev_) {
    points_.push_back(p);
    prev_ = p;
    return p;
  }
  if (p.key <= prev_->key || p.position <= prev_->position)
    throw std::invalid_argument("CDF points must strictly increase");

  const SplinePoint& base = points_.back();
  const auto dx = static_cast<double>(p.key - base.key);
  const double y = static_cast<double>(p.position) - static_cast<double>(base.position);
  const double eps = static_cast<double>(epsilon_);
  const double upper = (y + eps) / dx;
  const double lower = (y - eps) / dx;

  std::optional<SplinePoint> emitted;
  if (!corridor_open_) {
    upper_slope_ = upper;
    lower_slope_ = lower;
    corridor_open_ = true;
  } else {
    const double slope = y / dx;
    if (slope < lower_slope_ || slope > upper_slope_) {
      points_.push_back(*prev_);
      emitted = *prev_;
      const SplinePoint& fresh = points_.back();
      const auto fresh_dx = static_cast<double>(p.key - fresh.key);
      const double fresh_y = static_cast<double>(p.position) - static_cast<double>(fresh.position);
      upper_slope_ = (fresh_y + eps) / fresh_dx;
      lower_slope_ = (fresh_y - eps) / fresh_dx;
    } else {
      upper_slope_ = std::min(upper_slope_, upper);
      lower_slope_ = std::max(lower_slope_, lower);
    }
  }
  prev_ = p;
  return emitted;
}

std::optional<SplinePoint> SplineBuilder::flush() {
  if (flushed_) return std::nullopt;
  flushed_ = true;
  if (prev_ && points_.back().key != prev_->key) {
    points_.push_back(*prev_);
    return *prev_;
  }
  return std::nullopt;
}

SplineModel SplineBuilder::finish(std::uint64_t num_keys) {
  flush();
  if (points_.empty()) throw std::invalid_argument("empty dataset");
  SplineModel model;
  model.points = std::move(points_);
  model.epsilon = epsilon_;
  model.num_keys = num_keys;
  model.width = width_;
  points_.clear();
  return model;
}

SplineModel build_spline(std::span<const CdfPoint> cdf, std::uint64_t epsilon,
                         std::uint64_t num_keys, KeyWidth width) {
  if (cdf.empty()) throw std::invalid_argument("empty dataset");
  SplineBuilder builder(epsilon, width);
  for (const CdfPoint& p : cdf) builder.add(p);
  return builder.finish(num_keys);
}

SplineModel build_spline(std::span<const Key> sorted_keys, std::uint64_t epsilon,
                         KeyWidth width) {
  if (sorted_keys.empty()) throw std::invalid_argument("empty dataset");
  SplineBuilder builder(epsilon, width);
  for (std::size_t i = 0; i < sorted_keys.size(); ++i) {
    if (i > 0) {
      if (sorted_keys[i] < sorted_keys[i - 1]) throw std::invalid_argument("data is not sorted");
      if (sorted_keys[i] == sorted_keys[i - 1]) continue;
    }
    builder.add({sorted_keys[i], i});
  }
  return builder.finish(sorted_keys.size());
}

}  // namespace plex
