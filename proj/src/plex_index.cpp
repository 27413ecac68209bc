#include "plex/plex_index.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string_view>

namespace plex {

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t elapsed_ns(Clock::time_point since) {
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - since).count());
}

TunerChoice best_radix_table(const RadixCostTracker& radix, std::uint64_t spline_bytes) {
  TunerChoice best{SubindexKind::RadixTable, 1, 0, radix.lambda(1), RadixTableIndex::bytes_for(1)};
  const unsigned radix_max = std::min(radix.r_max(), RadixTableIndex::kMaxBits);
  for (unsigned r = 2; r <= radix_max; ++r) {
    const std::uint64_t bytes = RadixTableIndex::bytes_for(r);
    if (bytes > spline_bytes) break;
    if (radix.lambda(r) < best.predicted_lambda) best = {SubindexKind::RadixTable, r, 0, radix.lambda(r), bytes};
  }
  return best;
}

}  // namespace

PlexIndex PlexIndex::build(std::span<const Key> data, std::uint64_t epsilon, KeyWidth width,
                           const BuildOptions& options, TuningReport* report) {
  if (data.empty()) throw std::invalid_argument("empty dataset");
  const auto start = Clock::now();

  // Pass 1: spline and per-r radix cost, streamed together. Data keys of a
  // CDF point are reported after the spline decided whether that point is a
  // knot, which keeps the tracker's events in key order.
  SplineBuilder spline_builder(epsilon, width);
  RadixCostTracker radix(options.max_radix_bits, width);
  Key pending_key = data[0];
  std::uint64_t pending_count = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Key k = data[i];
    if (i > 0) {
      if (k == pending_key) {
        ++pending_count;
        continue;
      }
      if (k < pending_key) throw std::invalid_argument("data is not sorted");
    }
    if (auto knot = spline_builder.add({k, i})) radix.add_spline_point(knot->key);
    if (i > 0) radix.add_data_keys(pending_key, pending_count);
    pending_key = k;
    pending_count = 1;
  }
  if (auto knot = spline_builder.flush()) radix.add_spline_point(knot->key);
  radix.add_data_keys(pending_key, pending_count);
  radix.finish();

  PlexIndex index;
  index.num_keys_ = data.size();
  index.spline_ = spline_builder.finish(data.size());
  index.stats_.spline_build_ns = elapsed_ns(start);

  // Pass 2: tune over the spline keys.
  const auto tune_start = Clock::now();
  std::vector<Key> knots(index.spline_.points.size());
  std::transform(index.spline_.points.begin(), index.spline_.points.end(), knots.begin(),
                 [](const SplinePoint& p) { return p.key; });
  const std::uint64_t spline_bytes = index.spline_.size_in_bytes();
  const LcpHistogram hist = build_lcp_histogram(knots, width);
  CostSurface surface = compute_cost_surface(hist, options.max_radix_bits, options.max_delta);
  index.choice_ = options.radix_table_only ? best_radix_table(radix, spline_bytes)
                                           : select_subindex(surface, radix, spline_bytes);
  index.stats_.tune_ns = elapsed_ns(tune_start);

  const auto subindex_start = Clock::now();
  switch (index.choice_.kind) {
    case SubindexKind::BinarySearchOnly:
      break;
    case SubindexKind::RadixTable:
      index.subindex_ = build_radix_table(index.spline_.points, index.choice_.r, width);
      break;
    case SubindexKind::Cht:
      index.subindex_ = build_cht(knots, {index.choice_.r, index.choice_.delta, width});
      break;
  }
  index.stats_.subindex_build_ns = elapsed_ns(subindex_start);
  index.stats_.total_ns = elapsed_ns(start);
  index.stats_.total_bytes = index.size_in_bytes();

  if (report) {
    report->radix_lambdas = radix.lambdas();
    report->surface = std::move(surface);
    report->choice = index.choice_;
    report->spline_bytes = spline_bytes;
  }
  return index;
}

PlexIndex PlexIndex::binary_search_baseline(std::uint64_t num_keys, KeyWidth width) {
  PlexIndex index;
  index.num_keys_ = num_keys;
  index.spline_.width = width;
  index.spline_.num_keys = num_keys;
  return index;
}

std::size_t PlexIndex::find_segment(Key k) const {
  const std::size_t n = spline_.points.size();
  if (const auto* table = std::get_if<RadixTableIndex>(&subindex_)) {
    const SearchBound b = table->lookup(k);
    return spline_.segment_search(b.begin, b.end - b.begin, k);
  }
  if (const auto* tree = std::get_if<CompactHistTree>(&subindex_)) {
    const SearchBound b = tree->search_bound(k);
    return spline_.segment_search(b.begin, b.end - b.begin, k);
  }
  return spline_.segment_search(0, n, k);
}

SearchBound PlexIndex::search_bound(Key k) const {
  if (spline_.points.empty()) return {0, num_keys_};
  if (k > spline_.width.max_key()) return {num_keys_, num_keys_};
  const std::uint64_t estimate = spline_.interpolate(find_segment(k), k);
  const std::uint64_t eps = spline_.epsilon;
  const std::uint64_t begin = estimate > eps ? estimate - eps : 0;
  const std::uint64_t end = std::min(num_keys_, estimate + eps + 1);
  return {begin, end};
}

std::uint64_t PlexIndex::lookup(std::span<const Key> data, Key k) const {
  const std::uint64_t n = data.size();
  const SearchBound bound = search_bound(k);
  const auto first = data.begin();
  std::uint64_t pos = static_cast<std::uint64_t>(
      std::lower_bound(first + bound.begin, first + bound.end, k) - first);

  // Absent keys right after a long run of duplicates can fall outside the
  // window; gallop towards the true lower bound.
  if (pos == bound.end && pos < n && data[pos] < k) {
    std::uint64_t lo = pos;
    std::uint64_t step = 1;
    std::uint64_t hi;
    for (;;) {
      hi = lo + step;
      if (hi >= n) {
        hi = n;
        break;
      }
      if (data[hi] >= k) break;
      lo = hi;
      step *= 2;
    }
    pos = static_cast<std::uint64_t>(std::lower_bound(first + lo + 1, first + hi, k) - first);
  } else if (pos == bound.begin && pos > 0 && data[pos - 1] >= k) {
    std::uint64_t hi = pos - 1;
    std::uint64_t step = 1;
    std::uint64_t lo_excl;  // one past the last position known to be < k
    for (;;) {
      if (hi < step) {
        lo_excl = 0;
        break;
      }
      const std::uint64_t lo = hi - step;
      if (data[lo] < k) {
        lo_excl = lo + 1;
        break;
      }
      hi = lo;
      step *= 2;
    }
    pos = static_cast<std::uint64_t>(std::lower_bound(first + lo_excl, first + hi + 1, k) - first);
  }
  return pos;
}

std::uint64_t PlexIndex::subindex_bytes() const {
  if (const auto* table = std::get_if<RadixTableIndex>(&subindex_)) return table->size_in_bytes();
  if (const auto* tree = std::get_if<CompactHistTree>(&subindex_)) return tree->size_in_bytes();
  return 0;
}

// ---------------------------------------------------------------------------
// Serialization. All integers little-endian:
//   "PLEX" u32 version, u64 epsilon, u32 width, u64 |S|, u64 |D|, u8 tag,
//   f64 predicted lambda, u64 predicted bytes,
//   |S| x (u64 key, u64 position),
//   tag 1: u32 r, u64 n, n x u32 offsets
//   tag 2: u32 r, u32 delta, u64 n, n x u32 cells
// ---------------------------------------------------------------------------

namespace {

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void raw(std::string_view s) { out_.insert(out_.end(), s.begin(), s.end()); }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(get(1)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::size_t remaining() const { return in_.size() - at_; }

  void expect(std::size_t bytes, const char* what) const {
    if (remaining() < bytes) throw std::runtime_error(std::string("truncated PLEX file: ") + what);
  }

 private:
  std::uint64_t get(int n) {
    expect(static_cast<std::size_t>(n), "header");
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(in_[at_ + i]) << (8 * i);
    at_ += static_cast<std::size_t>(n);
    return v;
  }
  std::span<const std::uint8_t> in_;
  std::size_t at_ = 0;
};

constexpr std::string_view kMagic = "PLEX";

}  // namespace

std::vector<std::uint8_t> PlexIndex::serialize() const {
  Writer w;
  w.raw(kMagic);
  w.u32(kFormatVersion);
  w.u64(spline_.epsilon);
  w.u32(spline_.width.bits);
  w.u64(spline_.points.size());
  w.u64(num_keys_);
  w.u8(static_cast<std::uint8_t>(choice_.kind));
  w.f64(choice_.predicted_lambda);
  w.u64(choice_.predicted_bytes);
  for (const SplinePoint& p : spline_.points) {
    w.u64(p.key);
    w.u64(p.position);
  }
  if (const auto* table = std::get_if<RadixTableIndex>(&subindex_)) {
    w.u32(table->r);
    w.u64(table->offsets.size());
    for (std::uint32_t o : table->offsets) w.u32(o);
  } else if (const auto* tree = std::get_if<CompactHistTree>(&subindex_)) {
    w.u32(tree->config().r);
    w.u32(tree->config().delta);
    w.u64(tree->cells().size());
    for (std::uint32_t c : tree->cells()) w.u32(c);
  }
  return w.take();
}

PlexIndex PlexIndex::deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kMagic.size() ||
      !std::equal(kMagic.begin(), kMagic.end(), bytes.begin(),
                  [](char a, std::uint8_t b) { return static_cast<std::uint8_t>(a) == b; }))
    throw std::runtime_error("not a PLEX file");
  Reader in(bytes.subspan(kMagic.size()));

  const std::uint32_t version = in.u32();
  if (version != kFormatVersion)
    throw std::runtime_error("unsupported PLEX format version " + std::to_string(version));

  PlexIndex index;
  index.spline_.epsilon = in.u64();
  const std::uint32_t width_bits = in.u32();
  if (width_bits < 1 || width_bits > 64) throw std::runtime_error("corrupt PLEX file: key width");
  const KeyWidth width(width_bits);
  index.spline_.width = width;
  const std::uint64_t spline_size = in.u64();
  index.num_keys_ = in.u64();
  index.spline_.num_keys = index.num_keys_;
  const std::uint8_t tag = in.u8();
  if (tag > static_cast<std::uint8_t>(SubindexKind::Cht))
    throw std::runtime_error("corrupt PLEX file: subindex tag");
  index.choice_.kind = static_cast<SubindexKind>(tag);
  index.choice_.predicted_lambda = in.f64();
  index.choice_.predicted_bytes = in.u64();

  if (spline_size > in.remaining() / 16) throw std::runtime_error("truncated PLEX file: spline");
  if (spline_size > 0 && index.spline_.epsilon < 1) throw std::runtime_error("corrupt PLEX file: epsilon");
  index.spline_.points.resize(spline_size);
  for (std::uint64_t i = 0; i < spline_size; ++i) {
    SplinePoint& p = index.spline_.points[i];
    p.key = in.u64();
    p.position = in.u64();
    if (!width.fits(p.key) || p.position >= index.num_keys_ ||
        (i > 0 && (p.key <= index.spline_.points[i - 1].key ||
                   p.position <= index.spline_.points[i - 1].position)))
      throw std::runtime_error("corrupt PLEX file: spline points");
  }
  if (spline_size == 0 && index.choice_.kind != SubindexKind::BinarySearchOnly)
    throw std::runtime_error("corrupt PLEX file: subindex without spline");

  switch (index.choice_.kind) {
    case SubindexKind::BinarySearchOnly:
      break;
    case SubindexKind::RadixTable: {
      RadixTableIndex table;
      table.width = width;
      table.r = in.u32();
      const std::uint64_t count = in.u64();
      if (table.r < 1 || table.r > std::min(width.bits, RadixTableIndex::kMaxBits) ||
          count != (std::uint64_t{1} << table.r) + 1)
        throw std::runtime_error("corrupt PLEX file: radix table shape");
      if (count > in.remaining() / 4) throw std::runtime_error("truncated PLEX file: radix table");
      table.offsets.resize(count);
      for (auto& o : table.offsets) o = in.u32();
      if (table.offsets.front() != 0 || table.offsets.back() != spline_size ||
          !std::is_sorted(table.offsets.begin(), table.offsets.end()))
        throw std::runtime_error("corrupt PLEX file: radix table offsets");
      index.choice_.r = table.r;
      index.subindex_ = std::move(table);
      break;
    }
    case SubindexKind::Cht: {
      ChtConfig config;
      config.width = width;
      config.r = in.u32();
      config.delta = in.u32();
      const std::uint64_t count = in.u64();
      if (config.r < 1 || config.r > std::min(width.bits, 30u) || config.delta < 1)
        throw std::runtime_error("corrupt PLEX file: cht shape");
      if (count > in.remaining() / 4) throw std::runtime_error("truncated PLEX file: cht cells");
      std::vector<std::uint32_t> cells(count);
      for (auto& c : cells) c = in.u32();
      try {
        index.subindex_ = CompactHistTree(config, spline_size, std::move(cells));
      } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("corrupt PLEX file: ") + e.what());
      }
      index.choice_.r = config.r;
      index.choice_.delta = config.delta;
      break;
    }
  }
  if (in.remaining() != 0) throw std::runtime_error("corrupt PLEX file: trailing bytes");
  index.stats_.total_bytes = index.size_in_bytes();
  return index;
}

void PlexIndex::save(const std::string& path) const {
  const std::vector<std::uint8_t> bytes = serialize();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing " + path);
}

PlexIndex PlexIndex::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return deserialize(bytes);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

}  // namespace plex
