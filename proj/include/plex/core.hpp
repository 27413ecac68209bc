#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>

namespace plex {

using Key = std::uint64_t;

// Number of significant bits of every key in a dataset. Keys are compared and
// split MSB-first starting at bit (bits - 1).
struct KeyWidth {
  unsigned bits = 64;

  constexpr explicit KeyWidth(unsigned b = 64) : bits(b) {
    if (b < 1 || b > 64) throw std::invalid_argument("key width must be in [1, 64]");
  }

  constexpr Key max_key() const { return bits == 64 ? ~Key{0} : (Key{1} << bits) - 1; }
  constexpr bool fits(Key k) const { return k <= max_key(); }

  friend constexpr bool operator==(KeyWidth, KeyWidth) = default;
};

// A point of the empirical CDF: a distinct key and the index of its first
// occurrence in the sorted data.
struct CdfPoint {
  Key key;
  std::uint64_t position;

  friend constexpr bool operator==(const CdfPoint&, const CdfPoint&) = default;
};

// Half-open range of positions [begin, end).
struct SearchBound {
  std::uint64_t begin;
  std::uint64_t end;
};

/// Number of identical leading bits of a and b within the given width.
constexpr unsigned lcp(Key a, Key b, KeyWidth width) {
  const Key diff = a ^ b;
  if (diff == 0) return width.bits;
  return static_cast<unsigned>(std::countl_zero(diff)) - (64 - width.bits);
}

/// The top r bits of k, right-aligned. prefix(k, 0, w) == 0.
constexpr Key prefix(Key k, unsigned r, KeyWidth width) {
  if (r == 0) return 0;
  return k >> (width.bits - r);
}

// ceil(log2(c)) with the convention that empty and singleton ranges cost 0.
constexpr unsigned ceil_log2(std::uint64_t c) {
  return c <= 1 ? 0 : 64 - static_cast<unsigned>(std::countl_zero(c - 1));
}

}  // namespace plex
