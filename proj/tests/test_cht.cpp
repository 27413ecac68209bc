#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "plex/cht.hpp"
#include "plex/radix_table.hpp"

using namespace plex;

namespace {
const KeyWidth kW4{4};
const std::vector<Key> kEightKeys = {0, 5, 6, 7, 8, 10, 11, 15};
}  // namespace

TEST_CASE("eight key trees") {
  const CompactHistTree t12 = build_cht(kEightKeys, {1, 2, kW4});
  const CompactHistTree t22 = build_cht(kEightKeys, {2, 2, kW4});
  CHECK(t12.node_count() == 5);
  CHECK(t22.node_count() == 3);
  CHECK(t12.size_in_bytes() == 5 * 2 * 4);
  CHECK(t22.size_in_bytes() == 3 * 4 * 4);

  const ChtStats s12 = cht_stats(t12, kEightKeys);
  CHECK(s12.exact_avg_depth * 8 == doctest::Approx(6));
  CHECK(s12.avg_child_hops * 8 == doctest::Approx(14));

  for (std::size_t i = 0; i < kEightKeys.size(); ++i) {
    for (const CompactHistTree* t : {&t12, &t22}) {
      const std::uint32_t q = t->lookup(kEightKeys[i]);
      CHECK(q <= i);
      CHECK(i <= q + 1);
    }
  }
}

TEST_CASE("single node when delta covers everything") {
  const CompactHistTree t = build_cht(kEightKeys, {2, 8, kW4});
  CHECK(t.node_count() == 1);
  CHECK(t.lookup(15) == 7);
  CHECK(t.lookup(9) == 4);
}

TEST_CASE("width not divisible by r") {
  const KeyWidth w5{5};
  const std::vector<Key> keys = {0, 1, 2, 3, 4, 5, 6, 7, 16, 17, 30, 31};
  const CompactHistTree t = build_cht(keys, {2, 1, w5});
  for (std::size_t i = 0; i < keys.size(); ++i) CHECK(t.lookup(keys[i]) == i);
  CHECK(t.lookup(8) == 8);
  CHECK(t.lookup(31) == 11);
}

TEST_CASE("lookup bound and insertion positions on random sets") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 150; ++trial) {
    const KeyWidth w{10 + static_cast<unsigned>(rng() % 55)};
    const std::vector<Key> keys = oracle::clustered_keys(rng, 512, w);
    const unsigned r = 1 + static_cast<unsigned>(rng() % 8);
    const std::uint32_t delta = 1 + static_cast<std::uint32_t>(rng() % 64);
    const CompactHistTree t = build_cht(keys, {r, delta, w});
    for (std::size_t i = 0; i < keys.size(); ++i) {
      const std::uint32_t q = t.lookup(keys[i]);
      REQUIRE(q <= i);
      REQUIRE(i <= q + delta - 1);
    }
    for (int j = 0; j < 200; ++j) {
      const Key k = rng() & w.max_key();
      const std::uint64_t lb = oracle::lower_bound_pos(keys, k);
      const std::uint32_t q = t.lookup(k);
      REQUIRE(q <= lb);
      REQUIRE(lb <= q + delta);
      const SearchBound b = t.search_bound(k);
      REQUIRE(b.begin <= b.end);
      if (lb > 0) REQUIRE(b.begin <= lb - 1);
    }
    const ChtStats s = cht_stats(t, keys);
    REQUIRE(s.exact_avg_depth <= s.avg_child_hops);
    REQUIRE(s.memory_bytes == s.node_count * (std::size_t{1} << r) * 4);
  }
}

TEST_CASE("rejects bad input") {
  const std::vector<Key> dup = {1, 2, 2, 3};
  CHECK_THROWS_WITH(build_cht(dup, {1, 1, kW4}), "cht does not support duplicate keys");
  const std::vector<Key> unsorted = {3, 1};
  CHECK_THROWS_AS(build_cht(unsorted, {1, 1, kW4}), std::invalid_argument);
  CHECK_THROWS_AS(build_cht(kEightKeys, {0, 1, kW4}), std::invalid_argument);
  CHECK_THROWS_AS(build_cht(kEightKeys, {5, 1, kW4}), std::invalid_argument);
  CHECK_THROWS_AS(build_cht(kEightKeys, {1, 0, kW4}), std::invalid_argument);
}

TEST_CASE("corrupt cells are refused") {
  CHECK_THROWS(CompactHistTree({1, 1, kW4}, 2, {0u, CompactHistTree::kLeafFlag}));
  CHECK_THROWS(CompactHistTree({1, 1, kW4}, 2, {CompactHistTree::kLeafFlag | 9u, CompactHistTree::kLeafFlag}));
  CHECK_THROWS(CompactHistTree({1, 1, kW4}, 2, {CompactHistTree::kLeafFlag}));
  CHECK_NOTHROW(CompactHistTree({1, 1, kW4}, 2, {CompactHistTree::kLeafFlag, CompactHistTree::kLeafFlag | 1u}));
}

TEST_CASE("empty key set") {
  const std::vector<Key> none;
  const CompactHistTree t = build_cht(none, {3, 4, KeyWidth{}});
  CHECK(t.node_count() == 1);
  CHECK(t.lookup(12345) == 0);
}

TEST_CASE("one node tree agrees with the radix table") {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 50; ++trial) {
    const KeyWidth w{12 + static_cast<unsigned>(rng() % 53)};
    const std::vector<Key> keys = oracle::clustered_keys(rng, 300, w);
    std::vector<SplinePoint> pts;
    for (std::size_t i = 0; i < keys.size(); ++i) pts.push_back({keys[i], i});
    const unsigned r = 1 + static_cast<unsigned>(rng() % 10);
    const CompactHistTree t = build_cht(keys, {r, static_cast<std::uint32_t>(keys.size()), w});
    const RadixTableIndex table = build_radix_table(pts, r, w);
    REQUIRE(t.node_count() == 1);
    for (int j = 0; j < 300; ++j) {
      const Key k = j % 2 ? keys[rng() % keys.size()] : rng() & w.max_key();
      REQUIRE(t.lookup(k) == table.offsets[prefix(k, r, w)]);
      REQUIRE(t.search_bound(k).begin == table.lookup(k).begin);
    }
  }
}
