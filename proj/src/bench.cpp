#include "plex/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

#include "plex/data_io.hpp"

namespace plex {

LookupMismatch::LookupMismatch(Key k, std::uint64_t exp, std::uint64_t act)
    : std::runtime_error("lookup mismatch for key " + std::to_string(k) + ": expected position " +
                         std::to_string(exp) + ", got " + std::to_string(act)),
      key(k),
      expected(exp),
      actual(act) {}

void verify_lookups(const PlexIndex& index, std::span<const Key> data, std::span<const Key> probes) {
  if (data.size() != index.num_keys())
    throw std::invalid_argument("index was built over " + std::to_string(index.num_keys()) +
                                " keys, data has " + std::to_string(data.size()));
  for (Key k : probes) {
    const auto expected = static_cast<std::uint64_t>(std::lower_bound(data.begin(), data.end(), k) - data.begin());
    const std::uint64_t actual = index.lookup(data, k);
    if (actual != expected) throw LookupMismatch(k, expected, actual);
  }
}

namespace {

using Clock = std::chrono::steady_clock;

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0;
  const auto at = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size()))) - 1;
  const std::size_t idx = std::min(at, values.size() - 1);
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(idx), values.end());
  return values[idx];
}

// One timed pass over a slice; appends per-batch latencies.
std::uint64_t timed_pass(const PlexIndex& index, std::span<const Key> data, std::span<const Key> probes,
                         std::vector<double>& batch_ns) {
  std::uint64_t checksum = 0;
  for (std::size_t at = 0; at < probes.size(); at += kTimingBatch) {
    const std::size_t end = std::min(probes.size(), at + kTimingBatch);
    const auto start = Clock::now();
    for (std::size_t i = at; i < end; ++i) checksum += index.lookup(data, probes[i]);
    const auto ns = std::chrono::duration<double, std::nano>(Clock::now() - start).count();
    batch_ns.push_back(ns / static_cast<double>(end - at));
  }
  return checksum;
}

}  // namespace

ProbeTiming time_lookups(const PlexIndex& index, std::span<const Key> data, std::span<const Key> probes,
                         unsigned repeats, unsigned threads) {
  ProbeTiming timing;
  if (probes.empty() || repeats == 0) return timing;
  threads = std::max(1u, threads);

  std::vector<double> per_repeat;
  std::vector<double> batch_ns;
  for (unsigned rep = 0; rep < repeats; ++rep) {
    const auto start = Clock::now();
    if (threads == 1) {
      timing.checksum += timed_pass(index, data, probes, batch_ns);
    } else {
      std::vector<std::vector<double>> thread_batches(threads);
      std::vector<std::uint64_t> sums(threads, 0);
      std::vector<std::thread> pool;
      const std::size_t slice = (probes.size() + threads - 1) / threads;
      for (unsigned t = 0; t < threads; ++t) {
        const std::size_t begin = std::min(probes.size(), t * slice);
        const std::size_t end = std::min(probes.size(), begin + slice);
        pool.emplace_back([&, t, begin, end] {
          sums[t] = timed_pass(index, data, probes.subspan(begin, end - begin), thread_batches[t]);
        });
      }
      for (auto& th : pool) th.join();
      for (unsigned t = 0; t < threads; ++t) {
        timing.checksum += sums[t];
        batch_ns.insert(batch_ns.end(), thread_batches[t].begin(), thread_batches[t].end());
      }
    }
    const auto ns = std::chrono::duration<double, std::nano>(Clock::now() - start).count();
    per_repeat.push_back(ns * threads / static_cast<double>(probes.size()));
  }
  timing.median_ns = percentile(per_repeat, 0.5);
  timing.p99_ns = percentile(batch_ns, 0.99);
  return timing;
}

double measure_subindex_steps(const SplineModel& spline, const PlexIndex::Subindex& subindex,
                              std::span<const Key> probes) {
  if (probes.empty()) return 0;
  std::uint64_t steps = 0;
  for (Key k : probes) {
    SearchBound range{0, spline.size()};
    if (const auto* table = std::get_if<RadixTableIndex>(&subindex)) {
      range = table->lookup(k);
    } else if (const auto* tree = std::get_if<CompactHistTree>(&subindex)) {
      range = tree->search_bound(k);
      steps += tree->child_hops(k);
    }
    steps += ceil_log2(range.end - range.begin);
  }
  return static_cast<double>(steps) / static_cast<double>(probes.size());
}

GridSpec GridSpec::standard() {
  GridSpec spec;
  for (unsigned i = 1; i <= 10; ++i) {
    spec.epsilons.push_back(std::uint64_t{1} << i);
    spec.deltas.push_back(std::uint32_t{1} << i);
    spec.radix_bits.push_back(i);
  }
  return spec;
}

std::vector<GridRow> run_grid(std::span<const Key> data, const GridSpec& spec, KeyWidth width) {
  const std::vector<Key> probes = make_workload(data, {spec.num_probes, spec.seed, 1.0});
  std::vector<GridRow> rows;
  for (std::uint64_t eps : spec.epsilons) {
    TuningReport report;
    const PlexIndex index = PlexIndex::build(data, eps, width, spec.options, &report);
    const SplineModel& spline = index.spline();
    std::vector<Key> knots(spline.size());
    std::transform(spline.points.begin(), spline.points.end(), knots.begin(),
                   [](const SplinePoint& p) { return p.key; });

    GridRow base;
    base.epsilon = eps;
    base.spline_size = spline.size();
    base.spline_bytes = report.spline_bytes;

    GridRow chosen = base;
    chosen.config = {index.choice().kind, index.choice().r, index.choice().delta};
    chosen.bytes = index.subindex_bytes();
    chosen.feasible = chosen.bytes <= base.spline_bytes;
    chosen.chosen = true;
    chosen.predicted = index.choice().predicted_lambda;
    chosen.measured_steps = measure_subindex_steps(spline, index.subindex(), probes);
    rows.push_back(chosen);

    GridRow binary = base;
    binary.feasible = true;
    binary.predicted = report.radix_lambdas.at(0);
    binary.measured_steps = measure_subindex_steps(spline, std::monostate{}, probes);
    rows.push_back(binary);

    for (unsigned r : spec.radix_bits) {
      if (r > width.bits || r > RadixTableIndex::kMaxBits) continue;
      GridRow row = base;
      row.config = {SubindexKind::RadixTable, r, 0};
      row.bytes = RadixTableIndex::bytes_for(r);
      row.feasible = row.bytes <= base.spline_bytes;
      row.predicted = r < report.radix_lambdas.size() ? report.radix_lambdas[r]
                                                      : std::numeric_limits<double>::quiet_NaN();
      row.measured_steps = std::numeric_limits<double>::quiet_NaN();
      if (row.feasible) {
        const PlexIndex::Subindex table = build_radix_table(spline.points, r, width);
        row.measured_steps = measure_subindex_steps(spline, table, probes);
      }
      rows.push_back(row);
    }

    const CostSurface& surface = report.surface;
    for (unsigned r : spec.radix_bits) {
      if (r > width.bits || r > 30) continue;
      for (std::uint32_t delta : spec.deltas) {
        GridRow row = base;
        row.config = {SubindexKind::Cht, r, delta};
        const bool modeled = r <= surface.r_max() && delta <= surface.delta_max();
        const LcpHistogram hist = modeled ? LcpHistogram{} : build_lcp_histogram(knots, width);
        row.bytes = modeled ? surface.bytes(r, delta) : estimate_cht_memory(hist, r, delta).bytes;
        row.predicted = modeled ? surface.lambda(r, delta) : std::numeric_limits<double>::quiet_NaN();
        row.feasible = row.bytes <= base.spline_bytes;
        row.measured_steps = std::numeric_limits<double>::quiet_NaN();
        if (row.feasible) {
          const PlexIndex::Subindex tree = build_cht(knots, {r, delta, width});
          row.measured_steps = measure_subindex_steps(spline, tree, probes);
        }
        rows.push_back(row);
      }
    }
  }
  return rows;
}

}  // namespace plex
