#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "plex/core.hpp"

namespace plex {

// SOSD binary layout: little-endian u64 count followed by count u64 keys.
struct DatasetFile {
  std::string path;
  std::vector<Key> keys;  // sorted after loading
  bool was_sorted = true;
};

DatasetFile load_dataset(const std::string& path);
void write_dataset(const std::string& path, std::span<const Key> keys);

enum class DatasetKind { Uniform, Lognormal, BooksLike, FaceLike, OsmLike };

std::string to_string(DatasetKind kind);
std::optional<DatasetKind> parse_dataset_kind(const std::string& name);
std::vector<DatasetKind> all_dataset_kinds();

struct SyntheticSpec {
  DatasetKind kind = DatasetKind::Uniform;
  std::uint64_t n = 0;
  std::uint64_t seed = 42;
  // face_like only: fraction of keys placed at extreme values.
  double outlier_fraction = 0.0005;
};

/// Sorted synthetic keys; identical specs give identical arrays.
std::vector<Key> generate(const SyntheticSpec& spec);

struct WorkloadSpec {
  std::uint64_t num_probes = 0;
  std::uint64_t seed = 7;
  double positive_fraction = 1.0;
};

/// Probe keys: positives sampled uniformly from data, negatives from the
/// gaps between (and around) the stored keys.
std::vector<Key> make_workload(std::span<const Key> data, const WorkloadSpec& spec);

}  // namespace plex
