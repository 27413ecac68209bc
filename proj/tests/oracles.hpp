#pragma once

// Slow reference implementations shared by the unit tests and the acceptance
// runner.

#include <algorithm>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "plex/core.hpp"
#include "plex/spline.hpp"
#include "plex/tuner.hpp"

namespace plex::oracle {

inline std::string bit_string(Key k, KeyWidth w) {
  std::string s;
  for (unsigned i = w.bits; i-- > 0;) s.push_back(((k >> i) & 1) ? '1' : '0');
  return s;
}

inline unsigned lcp(Key a, Key b, KeyWidth w) {
  const std::string x = bit_string(a, w), y = bit_string(b, w);
  unsigned n = 0;
  while (n < x.size() && x[n] == y[n]) ++n;
  return n;
}

inline Key prefix(Key k, unsigned r, KeyWidth w) {
  const std::string s = bit_string(k, w).substr(0, r);
  Key v = 0;
  for (char c : s) v = (v << 1) | (c == '1' ? 1 : 0);
  return v;
}

// Last spline point with key <= k, clamped to a valid segment.
inline std::size_t segment(const SplineModel& m, Key k) {
  if (m.points.size() <= 1) return 0;
  std::size_t s = 0;
  for (std::size_t i = 0; i < m.points.size(); ++i)
    if (m.points[i].key <= k) s = i;
  return std::min(s, m.points.size() - 2);
}

// Every distinct key's interpolated position lies within eps of its first
// occurrence. Returns the number of violations.
inline std::size_t eps_violations(const SplineModel& m, std::span<const Key> sorted) {
  std::size_t bad = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i > 0 && sorted[i] == sorted[i - 1]) continue;
    const std::uint64_t est = m.interpolate(segment(m, sorted[i]), sorted[i]);
    const std::uint64_t diff = est > i ? est - i : i - est;
    if (diff > m.epsilon) ++bad;
  }
  return bad;
}

struct PairCost {
  double lambda = 0;
  std::uint64_t depth = 0;
  std::uint64_t nodes = 1;
};

// One (r, delta) pair from scratch: for every used lcp-length p, each maximal
// run of lcp >= p is a bin. A run of len positions is charged len when
// len - 1 >= delta and is a node when it spans more than delta keys.
inline PairCost per_pair_cost(const std::vector<std::uint8_t>& h, std::size_t num_keys, unsigned width,
                             unsigned r, std::uint32_t delta, std::uint32_t delta_max) {
  PairCost c;
  for (unsigned p = r; p < width; p += r) {
    std::size_t i = 0;
    while (i < h.size()) {
      if (h[i] < p) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < h.size() && h[j] >= p) ++j;
      const std::uint64_t len = j - i;
      if (std::min<std::uint64_t>(len - 1, delta_max) >= delta) c.depth += len;
      if (len + 1 > delta) ++c.nodes;
      i = j;
    }
  }
  c.lambda = ceil_log2(delta) + static_cast<double>(c.depth) / static_cast<double>(num_keys);
  return c;
}

// Sorted distinct keys with clustered prefixes so radix trees get deep.
inline std::vector<Key> clustered_keys(std::mt19937_64& rng, std::size_t max_n, KeyWidth w) {
  const Key space = w.max_key();
  const std::size_t cap = w.bits >= 20 ? max_n : std::min<std::size_t>(max_n, (std::size_t{1} << w.bits) / 2);
  const std::size_t n = 1 + rng() % std::max<std::size_t>(cap, 1);
  const unsigned clusters = 1 + static_cast<unsigned>(rng() % 6);
  std::vector<Key> centers(clusters);
  std::vector<unsigned> spread(clusters);
  for (unsigned c = 0; c < clusters; ++c) {
    centers[c] = w.bits == 64 ? rng() : rng() % (space + 1);
    spread[c] = 1 + static_cast<unsigned>(rng() % w.bits);
  }
  std::vector<Key> keys;
  for (std::size_t i = 0; keys.size() < n && i < 50 * n; ++i) {
    const unsigned c = static_cast<unsigned>(rng() % clusters);
    const Key mask = spread[c] >= 64 ? ~Key{0} : (Key{1} << spread[c]) - 1;
    keys.push_back((centers[c] & ~mask) | (rng() & mask));
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  return keys;
}

inline std::uint64_t lower_bound_pos(std::span<const Key> data, Key k) {
  return static_cast<std::uint64_t>(std::lower_bound(data.begin(), data.end(), k) - data.begin());
}

}  // namespace plex::oracle
