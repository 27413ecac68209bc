#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "plex/cht.hpp"
#include "plex/core.hpp"
#include "plex/radix_table.hpp"
#include "plex/spline.hpp"
#include "plex/tuner.hpp"

namespace plex {

struct BuildOptions {
  unsigned max_radix_bits = kDefaultMaxRadixBits;
  std::uint32_t max_delta = kDefaultMaxDelta;
  // Restrict the tuner to radix tables (a plain RadixSpline configuration).
  bool radix_table_only = false;
};

struct BuildStats {
  std::uint64_t spline_build_ns = 0;
  std::uint64_t tune_ns = 0;
  std::uint64_t subindex_build_ns = 0;
  std::uint64_t total_ns = 0;
  std::uint64_t total_bytes = 0;
};

// Everything the tuner looked at while building; filled on request.
struct TuningReport {
  std::vector<double> radix_lambdas;  // lambda_r for r = 0..r_max
  CostSurface surface;
  TunerChoice choice;
  std::uint64_t spline_bytes = 0;
};

class PlexIndex {
 public:
  using Subindex = std::variant<std::monostate, RadixTableIndex, CompactHistTree>;

  static constexpr std::uint32_t kFormatVersion = 1;

  PlexIndex() = default;

  /// Spline, auto-tuned subindex, and the single hyperparameter epsilon.
  static PlexIndex build(std::span<const Key> data, std::uint64_t epsilon,
                         KeyWidth width = KeyWidth{}, const BuildOptions& options = {},
                         TuningReport* report = nullptr);

  /// Binary search over the whole data array; no spline, zero index bytes.
  static PlexIndex binary_search_baseline(std::uint64_t num_keys, KeyWidth width = KeyWidth{});

  /// Index of the spline point that starts k's segment.
  std::size_t find_segment(Key k) const;

  /// Window [p - eps, p + eps] around the interpolated position, clipped to the data.
  SearchBound search_bound(Key k) const;

  /// Position of the first element >= k in data (the data this index was built on).
  std::uint64_t lookup(std::span<const Key> data, Key k) const;

  const SplineModel& spline() const { return spline_; }
  const Subindex& subindex() const { return subindex_; }
  const TunerChoice& choice() const { return choice_; }
  const BuildStats& stats() const { return stats_; }
  std::uint64_t epsilon() const { return spline_.epsilon; }
  std::uint64_t num_keys() const { return num_keys_; }
  KeyWidth width() const { return spline_.width; }
  bool is_binary_search_baseline() const { return spline_.points.empty(); }

  std::uint64_t subindex_bytes() const;
  std::uint64_t size_in_bytes() const { return spline_.size_in_bytes() + subindex_bytes(); }

  std::vector<std::uint8_t> serialize() const;
  static PlexIndex deserialize(std::span<const std::uint8_t> bytes);

  void save(const std::string& path) const;
  static PlexIndex load(const std::string& path);

 private:
  SplineModel spline_;
  Subindex subindex_;
  TunerChoice choice_;
  BuildStats stats_;
  std::uint64_t num_keys_ = 0;
};

}  // namespace plex
