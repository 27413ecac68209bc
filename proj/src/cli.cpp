#include "plex/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>

#include "plex/bench.hpp"
#include "plex/data_io.hpp"
#include "plex/plex_index.hpp"

namespace plex {

namespace {

using json = nlohmann::json;

struct GenArgs {
  std::string kind = "uniform";
  std::uint64_t n = 0;
  std::uint64_t seed = 42;
  double outlier_fraction = 0.0005;
  std::string out;
};

struct BuildArgs {
  std::string data;
  std::uint64_t epsilon = 32;
  std::string index = "plex";
  std::string out;
  unsigned max_r = kDefaultMaxRadixBits;
  std::uint32_t max_delta = kDefaultMaxDelta;
};

struct ProbeArgs {
  std::string index;
  std::string data;
  std::string dataset;
  std::string label;
  std::string csv;
  std::uint64_t probes = 100'000;
  double positive_fraction = 1.0;
  std::uint64_t seed = 7;
  unsigned repeats = 5;
  unsigned threads = 1;
};

struct TuneArgs {
  std::string data;
  std::uint64_t epsilon = 32;
  bool grid = false;
  bool json = false;
  bool all_deltas = false;
  std::uint64_t probes = 50'000;
  std::uint64_t seed = 11;
  unsigned max_r = kDefaultMaxRadixBits;
  std::uint32_t max_delta = kDefaultMaxDelta;
};

std::string stem_of(const std::string& path) { return std::filesystem::path(path).stem().string(); }

std::vector<std::uint8_t> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int cmd_gen(const GenArgs& args, std::ostream& out) {
  const auto kind = parse_dataset_kind(args.kind);
  if (!kind) throw std::invalid_argument("unknown dataset kind '" + args.kind + "'");
  SyntheticSpec spec{*kind, args.n, args.seed, args.outlier_fraction};
  const std::vector<Key> keys = generate(spec);
  write_dataset(args.out, keys);
  out << json{{"path", args.out}, {"kind", args.kind}, {"n", args.n}, {"seed", args.seed}}.dump() << '\n';
  return 0;
}

int cmd_build(const BuildArgs& args, std::ostream& out) {
  const DatasetFile file = load_dataset(args.data);
  PlexIndex index;
  if (args.index == "binary") {
    index = PlexIndex::binary_search_baseline(file.keys.size());
  } else {
    BuildOptions options;
    options.max_radix_bits = args.max_r;
    options.max_delta = args.max_delta;
    options.radix_table_only = args.index == "rs";
    index = PlexIndex::build(file.keys, args.epsilon, KeyWidth{}, options);
  }
  index.save(args.out);

  const BuildStats& stats = index.stats();
  json line{{"dataset", stem_of(args.data)},
            {"index", args.index},
            {"epsilon", args.index == "binary" ? 0 : args.epsilon},
            {"num_keys", file.keys.size()},
            {"input_sorted", file.was_sorted},
            {"spline_size", index.spline().size()},
            {"spline_bytes", index.spline().size_in_bytes()},
            {"choice", to_string(index.choice().kind)},
            {"r", index.choice().r},
            {"delta", index.choice().delta},
            {"predicted_lambda", index.choice().predicted_lambda},
            {"bytes", index.size_in_bytes()},
            {"subindex_bytes", index.subindex_bytes()},
            {"build_ns", stats.total_ns},
            {"spline_build_ns", stats.spline_build_ns},
            {"tune_ns", stats.tune_ns},
            {"subindex_build_ns", stats.subindex_build_ns},
            {"out", args.out}};
  out << line.dump() << '\n';
  return 0;
}

// Rebuilds the index from the data to time the full build (tuning included)
// and to confirm the file belongs to this data. Returns {label, build_ns}.
std::pair<std::string, std::uint64_t> rebuild_for_timing(const PlexIndex& loaded,
                                                         const std::vector<std::uint8_t>& bytes,
                                                         std::span<const Key> data,
                                                         const std::string& label) {
  if (loaded.is_binary_search_baseline()) return {label.empty() ? "binary" : label, 0};
  std::vector<std::string> candidates;
  if (label.empty()) {
    candidates = {"plex", "rs"};
  } else {
    candidates = {label};
  }
  for (const std::string& candidate : candidates) {
    BuildOptions options;
    options.radix_table_only = candidate == "rs";
    const PlexIndex rebuilt = PlexIndex::build(data, loaded.epsilon(), loaded.width(), options);
    if (rebuilt.serialize() == bytes) return {candidate, rebuilt.stats().total_ns};
  }
  throw std::runtime_error("index file does not match a default plex/rs build over this data");
}

int cmd_probe(const ProbeArgs& args, std::ostream& out) {
  const DatasetFile file = load_dataset(args.data);
  const std::vector<std::uint8_t> bytes = read_bytes(args.index);
  PlexIndex index;
  try {
    index = PlexIndex::deserialize(bytes);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(args.index + ": " + e.what());
  }
  if (index.num_keys() != file.keys.size())
    throw std::runtime_error("index covers " + std::to_string(index.num_keys()) + " keys but " + args.data +
                             " holds " + std::to_string(file.keys.size()));

  const std::vector<Key> probes = make_workload(file.keys, {args.probes, args.seed, args.positive_fraction});
  verify_lookups(index, file.keys, probes);

  std::string label = args.label;
  std::uint64_t build_ns = 0;
  if (label != "external") std::tie(label, build_ns) = rebuild_for_timing(index, bytes, file.keys, label);
  const ProbeTiming timing = time_lookups(index, file.keys, probes, args.repeats, args.threads);

  const bool binary = index.is_binary_search_baseline();
  std::ostringstream row;
  row << (args.dataset.empty() ? stem_of(args.data) : args.dataset) << ',' << label << ','
      << (binary ? 0 : index.epsilon()) << ',' << index.choice().r << ',' << index.choice().delta << ','
      << index.size_in_bytes() << ',' << build_ns << ',' << std::fixed << std::setprecision(2)
      << timing.median_ns << ',' << timing.p99_ns;

  if (args.csv.empty()) {
    out << kProbeCsvHeader << '\n' << row.str() << '\n';
  } else {
    const bool fresh = !std::filesystem::exists(args.csv) || std::filesystem::file_size(args.csv) == 0;
    std::ofstream csv(args.csv, std::ios::app);
    if (!csv) throw std::runtime_error("cannot open " + args.csv + " for appending");
    if (fresh) csv << kProbeCsvHeader << '\n';
    csv << row.str() << '\n';
    if (!csv) throw std::runtime_error("failed writing " + args.csv);
    out << row.str() << '\n';
  }
  return 0;
}

json config_json(const SubindexConfig& c) {
  return {{"kind", to_string(c.kind)}, {"r", c.r}, {"delta", c.delta}};
}

json nullable(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

int cmd_tune(const TuneArgs& args, std::ostream& out) {
  const DatasetFile file = load_dataset(args.data);
  BuildOptions options;
  options.max_radix_bits = args.max_r;
  options.max_delta = args.max_delta;
  TuningReport report;
  const PlexIndex index = PlexIndex::build(file.keys, args.epsilon, KeyWidth{}, options, &report);
  const CostSurface& surface = report.surface;
  const std::uint64_t budget = report.spline_bytes;

  std::vector<std::uint32_t> deltas;
  for (std::uint32_t d = 1; d <= surface.delta_max(); d = args.all_deltas ? d + 1 : d * 2) deltas.push_back(d);

  std::vector<GridRow> grid;
  if (args.grid) {
    GridSpec spec = GridSpec::standard();
    spec.num_probes = args.probes;
    spec.seed = args.seed;
    spec.options = options;
    grid = run_grid(file.keys, spec);
  }

  if (args.json) {
    json doc;
    doc["num_keys"] = file.keys.size();
    doc["epsilon"] = args.epsilon;
    doc["spline_size"] = index.spline().size();
    doc["spline_bytes"] = budget;
    doc["radix"] = json::array();
    for (unsigned r = 0; r < report.radix_lambdas.size(); ++r) {
      const std::uint64_t bytes = r == 0 ? 0 : RadixTableIndex::bytes_for(r);
      doc["radix"].push_back({{"r", r}, {"lambda", report.radix_lambdas[r]}, {"bytes", bytes},
                              {"feasible", bytes <= budget}});
    }
    doc["cht"] = json::array();
    for (unsigned r = 1; r <= surface.r_max(); ++r) {
      for (std::uint32_t d : deltas) {
        doc["cht"].push_back({{"r", r}, {"delta", d}, {"lambda", surface.lambda(r, d)},
                              {"depth_sum", surface.depth_sum(r, d)}, {"nodes", surface.node_count(r, d)},
                              {"bytes", surface.bytes(r, d)}, {"feasible", surface.bytes(r, d) <= budget}});
      }
    }
    const TunerChoice& c = index.choice();
    doc["choice"] = {{"kind", to_string(c.kind)}, {"r", c.r}, {"delta", c.delta},
                     {"predicted_lambda", c.predicted_lambda}, {"predicted_bytes", c.predicted_bytes}};
    if (args.grid) {
      doc["grid"] = json::array();
      for (const GridRow& row : grid) {
        doc["grid"].push_back({{"epsilon", row.epsilon}, {"config", config_json(row.config)},
                               {"spline_size", row.spline_size}, {"bytes", row.bytes},
                               {"feasible", row.feasible}, {"chosen", row.chosen},
                               {"predicted", nullable(row.predicted)},
                               {"measured_steps", nullable(row.measured_steps)}});
      }
    }
    out << doc.dump(2) << '\n';
    return 0;
  }

  out << "keys " << file.keys.size() << "  epsilon " << args.epsilon << "  spline points " << index.spline().size()
      << "  budget " << budget << " bytes\n\n";
  out << "radix table\n" << std::setw(4) << "r" << std::setw(12) << "lambda" << std::setw(14) << "bytes"
      << "  fits\n";
  for (unsigned r = 0; r < report.radix_lambdas.size(); ++r) {
    const std::uint64_t bytes = r == 0 ? 0 : RadixTableIndex::bytes_for(r);
    out << std::setw(4) << r << std::setw(12) << std::fixed << std::setprecision(4) << report.radix_lambdas[r]
        << std::setw(14) << bytes << "  " << (bytes <= budget ? "yes" : "no") << '\n';
  }
  out << "\ncht\n" << std::setw(4) << "r" << std::setw(7) << "delta" << std::setw(12) << "lambda" << std::setw(12)
      << "nodes" << std::setw(14) << "bytes" << "  fits\n";
  for (unsigned r = 1; r <= surface.r_max(); ++r) {
    for (std::uint32_t d : deltas) {
      out << std::setw(4) << r << std::setw(7) << d << std::setw(12) << surface.lambda(r, d) << std::setw(12)
          << surface.node_count(r, d) << std::setw(14) << surface.bytes(r, d) << "  "
          << (surface.bytes(r, d) <= budget ? "yes" : "no") << '\n';
    }
  }
  const TunerChoice& c = index.choice();
  out << "\nchoice " << to_string(c.kind) << " r=" << c.r << " delta=" << c.delta << " lambda=" << c.predicted_lambda
      << " bytes=" << c.predicted_bytes << '\n';

  if (args.grid) {
    out << "\ngrid\n" << std::setw(6) << "eps" << std::setw(13) << "subindex" << std::setw(4) << "r" << std::setw(7)
        << "delta" << std::setw(10) << "|S|" << std::setw(12) << "bytes" << std::setw(6) << "fits" << std::setw(11)
        << "predicted" << std::setw(11) << "measured" << "\n";
    for (const GridRow& row : grid) {
      out << std::setw(6) << row.epsilon << std::setw(13) << to_string(row.config.kind) << std::setw(4)
          << row.config.r << std::setw(7) << row.config.delta << std::setw(10) << row.spline_size << std::setw(12)
          << row.bytes << std::setw(6) << (row.feasible ? "yes" : "no") << std::setw(11) << row.predicted
          << std::setw(11) << row.measured_steps << (row.chosen ? "  <- tuner" : "") << '\n';
    }
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  const CLI::Range kAtLeastOne(std::uint64_t{1}, std::numeric_limits<std::uint64_t>::max());
  CLI::App app{"PLEX learned index: dataset generation, builds, probe benchmarks and tuner diagnostics"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Write a synthetic SOSD-format dataset");
  gen_cmd->add_option("--kind", gen.kind, "uniform | lognormal | books_like | face_like | osm_like")
      ->capture_default_str();
  gen_cmd->add_option("--n", gen.n, "Number of keys")->required()->check(kAtLeastOne);
  gen_cmd->add_option("--seed", gen.seed, "Generator seed")->capture_default_str();
  gen_cmd->add_option("--outlier-fraction", gen.outlier_fraction, "face_like outlier share")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 0.01));
  gen_cmd->add_option("--out", gen.out, "Output path")->required();

  BuildArgs build;
  auto* build_cmd = app.add_subcommand("build", "Build and serialize an index; prints a JSON stats line");
  build_cmd->add_option("--data", build.data, "SOSD dataset")->required();
  build_cmd->add_option("--epsilon", build.epsilon, "Maximum spline error")
      ->capture_default_str()
      ->check(kAtLeastOne);
  build_cmd->add_option("--index", build.index, "plex | rs | binary")
      ->capture_default_str()
      ->check(CLI::IsMember({"plex", "rs", "binary"}));
  build_cmd->add_option("--out", build.out, "Index output path")->required();
  build_cmd->add_option("--max-r", build.max_r, "Tuner bound on radix bits")->capture_default_str()->check(CLI::Range(1, 30));
  build_cmd->add_option("--max-delta", build.max_delta, "Tuner bound on delta")
      ->capture_default_str()
      ->check(CLI::Range(1, 1 << 20));

  ProbeArgs probe;
  auto* probe_cmd = app.add_subcommand("probe", "Verify, then time lookups; emits one CSV row");
  probe_cmd->add_option("--index", probe.index, "Serialized index")->required();
  probe_cmd->add_option("--data", probe.data, "SOSD dataset the index was built on")->required();
  probe_cmd->add_option("--dataset", probe.dataset, "Dataset name for the CSV (default: file stem)");
  probe_cmd->add_option("--label", probe.label, "Index name for the CSV (default: detected plex | rs | binary)");
  probe_cmd->add_option("--csv", probe.csv, "Append the row to this CSV file (header written when new)");
  probe_cmd->add_option("--probes", probe.probes, "Number of lookups")->capture_default_str()->check(kAtLeastOne);
  probe_cmd->add_option("--positive-fraction", probe.positive_fraction, "Share of probes present in the data")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  probe_cmd->add_option("--seed", probe.seed, "Workload seed")->capture_default_str();
  probe_cmd->add_option("--repeats", probe.repeats, "Timed passes")->capture_default_str()->check(kAtLeastOne);
  probe_cmd->add_option("--threads", probe.threads, "Concurrent readers")->capture_default_str()->check(CLI::Range(1, 256));

  TuneArgs tune;
  auto* tune_cmd = app.add_subcommand("tune", "Print cost-model tables and the tuner's choice");
  tune_cmd->add_option("--data", tune.data, "SOSD dataset")->required();
  tune_cmd->add_option("--epsilon", tune.epsilon, "Maximum spline error")
      ->capture_default_str()
      ->check(kAtLeastOne);
  tune_cmd->add_flag("--grid", tune.grid, "Also build the grid eps,delta in 2^1..2^10, r in 1..10 and measure it");
  tune_cmd->add_flag("--json", tune.json, "JSON output");
  tune_cmd->add_flag("--all-deltas", tune.all_deltas, "List every delta instead of powers of two");
  tune_cmd->add_option("--probes", tune.probes, "Positive probes for grid measurements")->capture_default_str();
  tune_cmd->add_option("--seed", tune.seed, "Probe seed")->capture_default_str();
  tune_cmd->add_option("--max-r", tune.max_r, "Tuner bound on radix bits")->capture_default_str()->check(CLI::Range(1, 30));
  tune_cmd->add_option("--max-delta", tune.max_delta, "Tuner bound on delta")
      ->capture_default_str()
      ->check(CLI::Range(1, 1 << 20));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen_cmd) return cmd_gen(gen, out);
    if (*build_cmd) return cmd_build(build, out);
    if (*probe_cmd) return cmd_probe(probe, out);
    if (*tune_cmd) return cmd_tune(tune, out);
  } catch (const LookupMismatch& e) {
    err << "error: correctness check failed: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace plex
