#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "plex/plex_index.hpp"

namespace plex {

class LookupMismatch : public std::runtime_error {
 public:
  LookupMismatch(Key key, std::uint64_t expected, std::uint64_t actual);
  Key key;
  std::uint64_t expected;
  std::uint64_t actual;
};

/// Checks every probe against std::lower_bound; throws LookupMismatch on the
/// first disagreement.
void verify_lookups(const PlexIndex& index, std::span<const Key> data, std::span<const Key> probes);

struct ProbeTiming {
  double median_ns = 0;  // median over repeats of mean ns per lookup
  double p99_ns = 0;     // 99th percentile of per-batch mean ns per lookup
  std::uint64_t checksum = 0;
};

inline constexpr std::size_t kTimingBatch = 64;

/// Times lookups after the caller has verified them. threads > 1 splits the
/// probes over concurrent readers of the same index.
ProbeTiming time_lookups(const PlexIndex& index, std::span<const Key> data,
                         std::span<const Key> probes, unsigned repeats, unsigned threads = 1);

// Subindex configurations the grid search and the step counter understand.
struct SubindexConfig {
  SubindexKind kind = SubindexKind::BinarySearchOnly;
  unsigned r = 0;
  std::uint32_t delta = 0;
};

/// Mean number of subindex search steps over the probes: CHILD hops in the
/// tree plus halving steps of the binary search over the candidate spline
/// range (ceil(log2(range length))).
double measure_subindex_steps(const SplineModel& spline, const PlexIndex::Subindex& subindex,
                              std::span<const Key> probes);

struct GridSpec {
  std::vector<std::uint64_t> epsilons;
  std::vector<unsigned> radix_bits;
  std::vector<std::uint32_t> deltas;
  std::uint64_t num_probes = 50'000;
  std::uint64_t seed = 11;
  BuildOptions options{};

  /// Powers of two 2^1..2^10 for epsilon and delta, r in 1..10.
  static GridSpec standard();
};

struct GridRow {
  std::uint64_t epsilon = 0;
  SubindexConfig config;
  std::uint64_t spline_size = 0;
  std::uint64_t spline_bytes = 0;
  std::uint64_t bytes = 0;
  bool feasible = false;     // bytes within the spline-size budget
  bool chosen = false;       // the tuner's own pick at this epsilon
  double predicted = 0;
  double measured_steps = 0; // NaN when not built (infeasible)
};

/// For each epsilon: the tuner's choice plus every grid candidate, with the
/// cost model's prediction and the measured mean search steps on positive
/// probes. Infeasible candidates are reported but not built.
std::vector<GridRow> run_grid(std::span<const Key> data, const GridSpec& spec, KeyWidth width = KeyWidth{});

}  // namespace plex
