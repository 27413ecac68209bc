#include "plex/data_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>

namespace plex {

namespace {

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) return __builtin_bswap64(v);
  return v;
}

}  // namespace

DatasetFile load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw std::runtime_error("cannot open dataset " + path);
  const auto file_size = static_cast<std::uint64_t>(in.tellg());
  in.seekg(0);
  if (file_size < sizeof(std::uint64_t))
    throw std::runtime_error(path + ": empty or truncated dataset header");

  std::uint64_t count = 0;
  in.read(reinterpret_cast<char*>(&count), sizeof(count));
  count = to_little_endian(count);
  const std::uint64_t payload = file_size - sizeof(std::uint64_t);
  if (payload % sizeof(Key) != 0 || payload / sizeof(Key) != count) {
    throw std::runtime_error(path + ": header says " + std::to_string(count) + " keys but file holds " +
                             std::to_string(payload) + " payload bytes");
  }

  DatasetFile file;
  file.path = path;
  file.keys.resize(count);
  in.read(reinterpret_cast<char*>(file.keys.data()), static_cast<std::streamsize>(payload));
  if (!in) throw std::runtime_error(path + ": read failed");
  for (Key& k : file.keys) k = to_little_endian(k);
  file.was_sorted = std::is_sorted(file.keys.begin(), file.keys.end());
  if (!file.was_sorted) std::sort(file.keys.begin(), file.keys.end());
  return file;
}

void write_dataset(const std::string& path, std::span<const Key> keys) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  const std::uint64_t count = to_little_endian(keys.size());
  out.write(reinterpret_cast<const char*>(&count), sizeof(count));
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(keys.data()),
              static_cast<std::streamsize>(keys.size() * sizeof(Key)));
  } else {
    for (Key k : keys) {
      const Key le = to_little_endian(k);
      out.write(reinterpret_cast<const char*>(&le), sizeof(le));
    }
  }
  if (!out) throw std::runtime_error("failed writing " + path);
}

std::string to_string(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::Uniform:
      return "uniform";
    case DatasetKind::Lognormal:
      return "lognormal";
    case DatasetKind::BooksLike:
      return "books_like";
    case DatasetKind::FaceLike:
      return "face_like";
    case DatasetKind::OsmLike:
      return "osm_like";
  }
  return "unknown";
}

std::optional<DatasetKind> parse_dataset_kind(const std::string& name) {
  for (DatasetKind kind : all_dataset_kinds())
    if (to_string(kind) == name) return kind;
  return std::nullopt;
}

std::vector<DatasetKind> all_dataset_kinds() {
  return {DatasetKind::Uniform, DatasetKind::Lognormal, DatasetKind::BooksLike, DatasetKind::FaceLike,
          DatasetKind::OsmLike};
}

namespace {

// mt19937_64 output is fixed by the standard; the std distributions are not,
// so the transforms below are spelled out to keep datasets reproducible
// across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::uint64_t below(std::uint64_t bound) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(engine_()) * bound) >> 64);
  }
  double normal() {
    const double u1 = 1.0 - unit();
    const double u2 = unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

Key saturate(double v) {
  if (!(v > 0)) return 0;
  if (v >= 0x1.0p64) return ~Key{0};
  return static_cast<Key>(v);
}

// Picks index i with probability weights[i] / sum, via cumulative weights.
class WeightedPicker {
 public:
  explicit WeightedPicker(const std::vector<double>& weights) : cumulative_(weights.size()) {
    double total = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) cumulative_[i] = (total += weights[i]);
  }
  std::size_t pick(Rng& rng) const {
    const double x = rng.unit() * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), x);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
  }

 private:
  std::vector<double> cumulative_;
};

void fill_uniform(Rng& rng, std::vector<Key>& keys) {
  for (Key& k : keys) k = rng.bits();
}

// exp(N(0, 0.25)) clipped to +-6 sigma and stretched over the key space.
void fill_lognormal(Rng& rng, std::vector<Key>& keys) {
  constexpr double kSigma = 0.25;
  const double lo = std::exp(-6 * kSigma);
  const double hi = std::exp(6 * kSigma);
  for (Key& k : keys) {
    const double v = std::clamp(std::exp(kSigma * rng.normal()), lo, hi);
    k = saturate((v - lo) / (hi - lo) * 0x1.fffffffffffffp63);
  }
}

// Smooth, skewed popularity-like values: a mixture of log-normal modes.
void fill_books_like(Rng& rng, std::vector<Key>& keys) {
  constexpr double mu[] = {18.0, 20.5, 23.0};
  constexpr double sigma[] = {0.6, 0.9, 1.3};
  const WeightedPicker mode({0.25, 0.5, 0.25});
  for (Key& k : keys) {
    const std::size_t m = mode.pick(rng);
    k = saturate(std::exp(mu[m] + sigma[m] * rng.normal()));
  }
}

// Almost all keys below 2^56 (eight shared zero MSBs) with piecewise-varying
// density, plus a handful of keys in the top 1/16 of the key space.
void fill_face_like(Rng& rng, std::vector<Key>& keys, double outlier_fraction) {
  const std::uint64_t n = keys.size();
  std::uint64_t outliers = static_cast<std::uint64_t>(std::llround(static_cast<double>(n) * outlier_fraction));
  outliers = std::clamp<std::uint64_t>(outliers, n >= 2 ? 1 : 0, n / 100 + (n >= 2 ? 1 : 0));
  const std::uint64_t bulk_n = n - outliers;

  constexpr Key kBulkSpan = Key{1} << 56;
  const std::size_t pieces = static_cast<std::size_t>(std::max<std::uint64_t>(16, n / 1000));
  std::vector<Key> cuts(pieces + 1);
  cuts[0] = 0;
  cuts[pieces] = kBulkSpan;
  for (std::size_t i = 1; i < pieces; ++i) cuts[i] = rng.below(kBulkSpan);
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> weights(pieces);
  for (double& w : weights) w = std::exp(rng.normal());
  const WeightedPicker piece(weights);

  for (std::uint64_t i = 0; i < bulk_n; ++i) {
    const std::size_t p = piece.pick(rng);
    const Key width = cuts[p + 1] - cuts[p];
    keys[i] = cuts[p] + (width > 0 ? rng.below(width) : 0);
  }
  constexpr Key kOutlierBase = ~Key{0} - (Key{1} << 60) + 1;
  for (std::uint64_t i = bulk_n; i < n; ++i) keys[i] = kOutlierBase + rng.below(Key{1} << 60);
}

// Dense clusters of varying size and spread scattered over the key space.
void fill_osm_like(Rng& rng, std::vector<Key>& keys) {
  const std::size_t clusters = static_cast<std::size_t>(std::max<std::uint64_t>(8, keys.size() / 5000));
  std::vector<Key> centers(clusters);
  std::vector<unsigned> spread_bits(clusters);
  std::vector<double> weights(clusters);
  for (std::size_t c = 0; c < clusters; ++c) {
    centers[c] = rng.bits();
    spread_bits[c] = 16 + static_cast<unsigned>(rng.below(21));
    weights[c] = std::exp(1.5 * rng.normal());
  }
  const WeightedPicker cluster(weights);
  for (Key& k : keys) {
    const std::size_t c = cluster.pick(rng);
    const Key offset = rng.below(Key{1} << spread_bits[c]);
    k = centers[c] > ~Key{0} - offset ? ~Key{0} : centers[c] + offset;
  }
}

}  // namespace

std::vector<Key> generate(const SyntheticSpec& spec) {
  if (spec.n == 0) throw std::invalid_argument("dataset size must be >= 1");
  Rng rng(spec.seed);
  std::vector<Key> keys(spec.n);
  switch (spec.kind) {
    case DatasetKind::Uniform:
      fill_uniform(rng, keys);
      break;
    case DatasetKind::Lognormal:
      fill_lognormal(rng, keys);
      break;
    case DatasetKind::BooksLike:
      fill_books_like(rng, keys);
      break;
    case DatasetKind::FaceLike:
      fill_face_like(rng, keys, spec.outlier_fraction);
      break;
    case DatasetKind::OsmLike:
      fill_osm_like(rng, keys);
      break;
  }
  std::sort(keys.begin(), keys.end());
  return keys;
}

std::vector<Key> make_workload(std::span<const Key> data, const WorkloadSpec& spec) {
  if (data.empty()) throw std::invalid_argument("workload over an empty dataset");
  if (spec.positive_fraction < 0.0 || spec.positive_fraction > 1.0)
    throw std::invalid_argument("positive fraction must be in [0, 1]");
  Rng rng(spec.seed);
  const std::uint64_t n = data.size();
  const auto positives = static_cast<std::uint64_t>(
      std::llround(static_cast<double>(spec.num_probes) * spec.positive_fraction));

  // Gap i (0 <= i <= n) is the open interval between data[i - 1] and data[i],
  // with virtual bounds below the first and above the last key.
  const auto gap_width = [&](std::uint64_t i) -> Key {
    const Key lo = i == 0 ? 0 : data[i - 1] + 1;
    if (i == 0 && data[0] == 0) return 0;
    if (i == n) return data[n - 1] == ~Key{0} ? 0 : ~Key{0} - data[n - 1];
    return data[i] > lo ? data[i] - lo : 0;
  };
  const auto gap_low = [&](std::uint64_t i) -> Key { return i == 0 ? 0 : data[i - 1] + 1; };

  std::vector<std::uint64_t> gaps;  // built only if random probing keeps missing
  const auto negative = [&]() -> Key {
    for (int attempt = 0; attempt < 32; ++attempt) {
      const std::uint64_t i = rng.below(n + 1);
      const Key w = gap_width(i);
      if (w > 0) return gap_low(i) + rng.below(w);
    }
    if (gaps.empty()) {
      for (std::uint64_t i = 0; i <= n; ++i)
        if (gap_width(i) > 0) gaps.push_back(i);
      if (gaps.empty()) throw std::invalid_argument("dataset leaves no room for absent keys");
    }
    const std::uint64_t i = gaps[rng.below(gaps.size())];
    return gap_low(i) + rng.below(gap_width(i));
  };

  std::vector<Key> probes;
  probes.reserve(spec.num_probes);
  for (std::uint64_t i = 0; i < spec.num_probes; ++i)
    probes.push_back(i < positives ? data[rng.below(n)] : negative());
  for (std::uint64_t i = probes.size(); i > 1; --i) std::swap(probes[i - 1], probes[rng.below(i)]);
  return probes;
}

}  // namespace plex
