#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "plex/data_io.hpp"
#include "plex/spline.hpp"

using namespace plex;

TEST_CASE("lognormal 10k keys stay within epsilon") {
  const std::vector<Key> keys = generate({DatasetKind::Lognormal, 10'000, 5});
  const SplineModel m = build_spline(keys, 32);
  CHECK(m.points.front().position == 0);
  CHECK(m.points.back().key == keys.back());
  CHECK(oracle::eps_violations(m, keys) == 0);
}

TEST_CASE("epsilon bound on random data and widths") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const KeyWidth w{8 + static_cast<unsigned>(rng() % 57)};
    std::vector<Key> keys(1 + rng() % 3000);
    for (Key& k : keys) k = (rng() >> (rng() % 40)) & w.max_key();
    if (trial % 4 == 0)
      for (std::size_t i = 1; i < keys.size(); i += 1 + rng() % 5) keys[i] = keys[i - 1];
    std::sort(keys.begin(), keys.end());
    const std::uint64_t eps = 1 + rng() % 64;
    const SplineModel m = build_spline(keys, eps, w);
    REQUIRE(oracle::eps_violations(m, keys) == 0);
    for (std::size_t i = 1; i < m.points.size(); ++i) {
      REQUIRE(m.points[i - 1].key < m.points[i].key);
      REQUIRE(m.points[i - 1].position < m.points[i].position);
    }
  }
}

TEST_CASE("duplicates use the first occurrence") {
  const std::vector<Key> keys = {1, 1, 1, 1, 1, 1, 1, 1, 2, 3, 3, 3, 3, 3, 3, 9};
  const SplineModel m = build_spline(keys, 1);
  CHECK(oracle::eps_violations(m, keys) == 0);
  for (const SplinePoint& p : m.points) CHECK(keys[p.position] == p.key);
  for (const SplinePoint& p : m.points) CHECK((p.position == 0 || keys[p.position - 1] < p.key));
}

TEST_CASE("tiny inputs") {
  const std::vector<Key> one = {7};
  const SplineModel m1 = build_spline(one, 4);
  CHECK(m1.size() == 1);
  CHECK(m1.interpolate(0, 7) == 0);
  CHECK(m1.segment_search(0, 1, 100) == 0);

  const std::vector<Key> same = {5, 5, 5};
  CHECK(build_spline(same, 2).size() == 1);

  const std::vector<Key> two = {3, 10};
  const SplineModel m2 = build_spline(two, 1);
  CHECK(m2.size() == 2);
  CHECK(m2.interpolate(0, 3) == 0);
  CHECK(m2.interpolate(0, 10) == 1);
  CHECK(m2.interpolate(0, 0) == 0);
  CHECK(m2.interpolate(0, 99) == 1);
}

TEST_CASE("errors") {
  const std::vector<Key> empty;
  CHECK_THROWS_WITH(build_spline(empty, 4), "empty dataset");
  const std::vector<Key> unsorted = {3, 1, 2};
  CHECK_THROWS_WITH(build_spline(unsorted, 4), "data is not sorted");
  const std::vector<Key> ok = {1, 2};
  CHECK_THROWS_AS(build_spline(ok, 0), std::invalid_argument);
  const std::vector<Key> wide = {1, 300};
  CHECK_THROWS_AS(build_spline(wide, 4, KeyWidth{8}), std::invalid_argument);
  const SplineModel m = build_spline(ok, 4);
  CHECK_THROWS_AS(m.interpolate(1, 1), std::out_of_range);
}

TEST_CASE("streaming builder matches batch build") {
  const std::vector<Key> keys = generate({DatasetKind::OsmLike, 20'000, 8});
  const SplineModel batch = build_spline(keys, 16);
  SplineBuilder builder(16);
  std::vector<SplinePoint> emitted;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (i > 0 && keys[i] == keys[i - 1]) continue;
    if (auto p = builder.add({keys[i], i})) emitted.push_back(*p);
  }
  if (auto p = builder.flush()) emitted.push_back(*p);
  CHECK(emitted == batch.points);
  CHECK_THROWS_AS(builder.add({keys.back() + 1, keys.size()}), std::logic_error);
}

TEST_CASE("segment_search agrees with a linear scan") {
  std::mt19937_64 rng(4);
  const std::vector<Key> keys = generate({DatasetKind::BooksLike, 5'000, 9});
  const SplineModel m = build_spline(keys, 4);
  for (int i = 0; i < 20000; ++i) {
    const Key k = i % 2 ? keys[rng() % keys.size()] : rng() >> (rng() % 64);
    REQUIRE(m.segment_search(0, m.size(), k) == oracle::segment(m, k));
  }
}
