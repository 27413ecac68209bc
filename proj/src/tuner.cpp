#include "plex/tuner.hpp"

#include <algorithm>
#include <stdexcept>
#include <tuple>

#include "plex/cht.hpp"
#include "plex/radix_table.hpp"

namespace plex {

LcpHistogram build_lcp_histogram(std::span<const Key> keys, KeyWidth width) {
  LcpHistogram hist;
  hist.width = width;
  hist.num_keys = keys.size();
  if (keys.size() < 2) return hist;
  hist.values.resize(keys.size() - 1);
  for (std::size_t i = 1; i < keys.size(); ++i) {
    if (keys[i] <= keys[i - 1]) throw std::invalid_argument("lcp histogram needs sorted distinct keys");
    hist.values[i - 1] = static_cast<std::uint8_t>(lcp(keys[i], keys[i - 1], width));
  }
  return hist;
}

CostSurface::CostSurface(unsigned r_max, std::uint32_t delta_max, std::size_t num_keys)
    : r_max_(r_max), delta_max_(delta_max), num_keys_(num_keys) {
  const std::size_t cells = static_cast<std::size_t>(r_max) * delta_max;
  lambda_.assign(cells, 0.0);
  depth_.assign(cells, 0);
  nodes_.assign(cells, 1);
}

std::uint64_t CostSurface::bytes(unsigned r, std::uint32_t delta) const {
  return node_count(r, delta) * (std::uint64_t{1} << r) * CompactHistTree::kCellBytes;
}

CostSurface compute_cost_surface(const LcpHistogram& hist, unsigned r_max, std::uint32_t delta_max) {
  if (r_max < 1 || delta_max < 1) throw std::invalid_argument("r_max and delta_max must be >= 1");
  if (hist.num_keys == 0) throw std::invalid_argument("cost surface over an empty spline");
  r_max = std::min({r_max, hist.width.bits, 30u});

  CostSurface surface(r_max, delta_max, hist.num_keys);
  const std::uint32_t dmax = delta_max;
  // Row r holds raw per-index counters in [0, dmax]; index 0 only collects
  // intervals that never affect any delta >= 1.
  std::vector<std::vector<std::uint64_t>> depth(r_max + 1, std::vector<std::uint64_t>(dmax + 1, 0));
  std::vector<std::vector<std::uint64_t>> bins(r_max + 1, std::vector<std::uint64_t>(dmax + 1, 0));

  struct Interval {
    std::size_t begin;
    std::size_t end;
  };
  std::vector<Interval> intervals;
  std::vector<Interval> survivors;
  if (!hist.values.empty()) intervals.push_back({0, hist.values.size()});
  surface.interval_counts_.assign(1, intervals.size());

  std::vector<unsigned> users;
  for (unsigned p = 1; !intervals.empty(); ++p) {
    users.clear();
    for (unsigned r = 1; r <= r_max; ++r)
      if (p % r == 0) users.push_back(r);

    survivors.clear();
    for (const Interval& interval : intervals) {
      std::size_t i = interval.begin;
      while (i < interval.end) {
        while (i < interval.end && hist.values[i] < p) ++i;
        const std::size_t run_begin = i;
        while (i < interval.end && hist.values[i] >= p) ++i;
        if (i == run_begin) continue;
        const std::uint64_t len = i - run_begin;
        for (unsigned r : users) {
          depth[r][std::min<std::uint64_t>(len - 1, dmax)] += len;
          bins[r][std::min<std::uint64_t>(len, dmax)] += 1;
        }
        survivors.push_back({run_begin, i});
      }
    }
    intervals.swap(survivors);
    surface.interval_counts_.push_back(intervals.size());
  }

  const auto num_keys = static_cast<double>(hist.num_keys);
  for (unsigned r = 1; r <= r_max; ++r) {
    for (std::uint32_t d = dmax - 1; d >= 1; --d) {
      depth[r][d] += depth[r][d + 1];
      bins[r][d] += bins[r][d + 1];
    }
    for (std::uint32_t d = 1; d <= dmax; ++d) {
      const std::size_t at = surface.index(r, d);
      surface.depth_[at] = depth[r][d];
      // A run of len positions spans len + 1 keys and is a node iff len + 1 > d.
      surface.nodes_[at] = 1 + bins[r][d];
      surface.lambda_[at] = ceil_log2(d) + static_cast<double>(depth[r][d]) / num_keys;
    }
  }
  return surface;
}

ChtMemoryEstimate estimate_cht_memory(const LcpHistogram& hist, unsigned r, std::uint32_t delta,
                                      std::size_t cell_bytes) {
  if (r < 1 || delta < 1) throw std::invalid_argument("r and delta must be >= 1");
  ChtMemoryEstimate estimate;
  estimate.node_count = 1;
  // Each maximal run of lcp >= p (p a multiple of r) is a group of len + 1
  // keys sharing a p-bit prefix; it needs its own node when it exceeds delta.
  for (unsigned p = r; p < hist.width.bits; p += r) {
    std::size_t i = 0;
    bool any = false;
    while (i < hist.values.size()) {
      while (i < hist.values.size() && hist.values[i] < p) ++i;
      const std::size_t run_begin = i;
      while (i < hist.values.size() && hist.values[i] >= p) ++i;
      if (i == run_begin) continue;
      any = true;
      if (i - run_begin + 1 > delta) ++estimate.node_count;
    }
    if (!any) break;
  }
  estimate.bytes = estimate.node_count * (std::uint64_t{1} << r) * cell_bytes;
  return estimate;
}

std::string to_string(SubindexKind kind) {
  switch (kind) {
    case SubindexKind::BinarySearchOnly:
      return "binary";
    case SubindexKind::RadixTable:
      return "radix_table";
    case SubindexKind::Cht:
      return "cht";
  }
  return "unknown";
}

namespace {

// Strict ordering of candidates: cost, then radix table before CHT, then
// memory, r and delta. A one-node CHT is a radix table without the sentinel
// entry, so ordering by memory first would hand every cost tie to the tree.
bool better(const TunerChoice& a, const TunerChoice& b) {
  const auto kind_rank = [](SubindexKind k) { return k == SubindexKind::RadixTable ? 0 : 1; };
  return std::make_tuple(a.predicted_lambda, kind_rank(a.kind), a.predicted_bytes, a.r, a.delta) <
         std::make_tuple(b.predicted_lambda, kind_rank(b.kind), b.predicted_bytes, b.r, b.delta);
}

}  // namespace

TunerChoice select_subindex(const CostSurface& surface, const RadixCostTracker& radix,
                            std::uint64_t spline_bytes) {
  TunerChoice best;
  best.kind = SubindexKind::BinarySearchOnly;
  best.predicted_lambda = radix.lambda(0);
  bool found = false;

  const auto offer = [&](const TunerChoice& candidate) {
    if (candidate.predicted_bytes > spline_bytes) return;
    if (!found || better(candidate, best)) {
      best = candidate;
      found = true;
    }
  };

  const unsigned radix_max = std::min(radix.r_max(), RadixTableIndex::kMaxBits);
  for (unsigned r = 1; r <= radix_max; ++r) {
    offer({SubindexKind::RadixTable, r, 0, radix.lambda(r), RadixTableIndex::bytes_for(r)});
  }
  for (unsigned r = 1; r <= surface.r_max(); ++r) {
    for (std::uint32_t d = 1; d <= surface.delta_max(); ++d) {
      offer({SubindexKind::Cht, r, d, surface.lambda(r, d), surface.bytes(r, d)});
    }
  }
  return best;
}

}  // namespace plex
