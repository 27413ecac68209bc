#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "plex/cli.hpp"
#include "plex/data_io.hpp"

using namespace plex;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "plexbench");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string temp(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("plex_cli_" + name)).string();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> split(const std::string& row) {
  std::vector<std::string> cells;
  std::stringstream in(row);
  for (std::string c; std::getline(in, c, ',');) cells.push_back(c);
  return cells;
}

}  // namespace

TEST_CASE("gen, build, probe") {
  const std::string data = temp("face.bin");
  const std::string csv = temp("bench.csv");
  std::filesystem::remove(csv);

  Run r = run({"gen", "--kind", "face_like", "--n", "20000", "--seed", "3", "--out", data});
  REQUIRE(r.code == 0);
  CHECK(load_dataset(data).keys.size() == 20000);

  for (std::string kind : {"plex", "rs", "binary"}) {
    const std::string idx = temp(kind + ".idx");
    r = run({"build", "--data", data, "--epsilon", "16", "--index", kind, "--out", idx});
    REQUIRE(r.code == 0);
    const auto stats = nlohmann::json::parse(r.out);
    CHECK(stats["index"] == kind);
    CHECK(stats["num_keys"] == 20000);
    if (kind == "binary") CHECK(stats["bytes"] == 0);
    if (kind == "rs") CHECK(stats["choice"] != "cht");

    r = run({"probe", "--index", idx, "--data", data, "--probes", "2000", "--positive-fraction", "0.5", "--repeats",
             "2", "--csv", csv, "--dataset", "face"});
    REQUIRE(r.code == 0);
    const std::vector<std::string> cells = split(lines(r.out).back());
    REQUIRE(cells.size() == 9);
    CHECK(cells[0] == "face");
    CHECK(cells[1] == kind);
    CHECK(std::stod(cells[7]) > 0);
    CHECK(std::stod(cells[8]) > 0);
  }

  std::ifstream in(csv);
  std::stringstream content;
  content << in.rdbuf();
  const std::vector<std::string> rows = lines(content.str());
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == kProbeCsvHeader);
  CHECK(split(rows[0]).size() == 9);

  r = run({"probe", "--index", temp("plex.idx"), "--data", data, "--probes", "100", "--repeats", "1"});
  REQUIRE(r.code == 0);
  CHECK(lines(r.out).size() == 2);
  CHECK(lines(r.out)[0] == kProbeCsvHeader);
}

TEST_CASE("probe refuses an index built on other data") {
  const std::string a = temp("a.bin"), b = temp("b.bin"), idx = temp("a.idx");
  REQUIRE(run({"gen", "--n", "5000", "--seed", "1", "--out", a}).code == 0);
  REQUIRE(run({"gen", "--n", "5000", "--seed", "2", "--out", b}).code == 0);
  REQUIRE(run({"build", "--data", a, "--out", idx}).code == 0);
  const Run r = run({"probe", "--index", idx, "--data", b, "--probes", "1000"});
  CHECK(r.code != 0);
  CHECK(r.err.find("error") != std::string::npos);
}

TEST_CASE("tune output") {
  const std::string data = temp("tune.bin");
  REQUIRE(run({"gen", "--kind", "osm_like", "--n", "20000", "--out", data}).code == 0);
  Run r = run({"tune", "--data", data, "--epsilon", "32"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("choice ") != std::string::npos);

  r = run({"tune", "--data", data, "--epsilon", "32", "--json", "--max-r", "8", "--max-delta", "16"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["radix"].size() == 9);
  CHECK(doc["cht"].size() == 8 * 5);
  CHECK(doc["choice"].contains("kind"));

  r = run({"tune", "--data", data, "--epsilon", "64", "--json", "--grid", "--probes", "500"});
  REQUIRE(r.code == 0);
  const auto grid = nlohmann::json::parse(r.out)["grid"];
  CHECK(grid.size() > 100);
  int chosen = 0;
  for (const auto& row : grid) chosen += row["chosen"].get<bool>() ? 1 : 0;
  CHECK(chosen == 10);
}

TEST_CASE("usage and runtime errors") {
  CHECK(run({}).code == 2);
  CHECK(run({"gen", "--n", "0", "--out", temp("zero.bin")}).code == 2);
  CHECK(run({"gen", "--n", "10", "--kind", "wiki", "--out", temp("w.bin")}).code != 0);
  CHECK(run({"build", "--data", temp("missing.bin"), "--out", temp("m.idx")}).code == 1);
  CHECK(run({"build", "--data", temp("missing.bin"), "--index", "btree", "--out", temp("m.idx")}).code == 2);
  CHECK(run({"--help"}).code == 0);
  const Run r = run({"probe", "--index", temp("missing.idx"), "--data", temp("missing.bin")});
  CHECK(r.code == 1);
  CHECK(r.err.find("missing.bin") != std::string::npos);
}
