#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixture.hpp"
#include "kwg/cli.hpp"
#include "kwg/ingest.hpp"

namespace fs = std::filesystem;
using kwg::testing::data_path;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run kwg_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = kwg::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("kwg_cli_" + std::to_string(::getpid())) / name;
  fs::create_directories(p.parent_path());
  return p;
}

std::size_t count_lines(const std::string& s) { return std::count(s.begin(), s.end(), '\n'); }

}  // namespace

TEST_CASE("demo prints the five answer rows") {
  const auto r = kwg_cli({"demo"});
  CHECK(r.code == 0);
  CHECK(count_lines(r.out) == 6);  // header plus rows
  CHECK(r.out.starts_with("?cell\t?county\t?obs\t?result\n"));
}

TEST_CASE("usage errors exit 1") {
  CHECK(kwg_cli({}).code == kwg::cli::kUsage);
  CHECK(kwg_cli({"frobnicate"}).code == kwg::cli::kUsage);
  const auto q = kwg_cli({"query", "/nonexistent/q.rq", "--config", data_path("louisiana/run.json")});
  CHECK(q.code == kwg::cli::kUsage);
  CHECK(q.err.find("not found") != std::string::npos);
  CHECK(kwg_cli({"export", "--config", "/nonexistent/run.json"}).code == kwg::cli::kUsage);
  CHECK(kwg_cli({"export", "--config", data_path("louisiana/run.json"), "--format", "xml"}).code == kwg::cli::kUsage);
}

TEST_CASE("ingest, relate and export are deterministic") {
  std::string first;
  for (int round = 0; round < 2; ++round) {
    const auto ing = scratch("ingested" + std::to_string(round) + ".nt");
    const auto rel = scratch("related" + std::to_string(round) + ".nt");
    const auto exp = scratch("export" + std::to_string(round) + ".ttl");
    REQUIRE(kwg_cli({"ingest", "--config", data_path("louisiana/run.json"), "--out", ing.string()}).code == 0);
    REQUIRE(kwg_cli({"relate", "--graph", ing.string(), "--level", "13", "--out", rel.string()}).code == 0);
    REQUIRE(kwg_cli({"export", "--graph", rel.string(), "--format", "ttl", "--out", exp.string()}).code == 0);
    const std::string text = kwg::ingest::read_file(rel) + kwg::ingest::read_file(exp);
    CHECK(text.size() > 1000);
    if (round == 0) first = text;
    else CHECK(text == first);
  }
  const auto l = kwg_cli({"load", "--graph", scratch("related0.nt").string()});
  CHECK(l.code == 0);
  CHECK(l.out.starts_with("loaded "));
}

TEST_CASE("validate exits 3 on a mutated graph") {
  const auto full = scratch("full.nt");
  REQUIRE(kwg_cli({"export", "--config", data_path("louisiana/run.json"), "--out", full.string()}).code == 0);
  const auto ok = kwg_cli({"validate", "--graph", full.string(), "--shapes", data_path("shapes.json")});
  CHECK(ok.code == 0);
  CHECK(ok.out == "0 violations\n");

  // drop one simple result
  std::istringstream in(kwg::ingest::read_file(full));
  std::ofstream mutated(scratch("mutated.nt"));
  bool dropped = false;
  for (std::string line; std::getline(in, line);) {
    if (!dropped && line.find("hasSimpleResult") != std::string::npos) {
      dropped = true;
      continue;
    }
    mutated << line << "\n";
  }
  mutated.close();
  REQUIRE(dropped);
  const auto bad = kwg_cli({"validate", "--graph", scratch("mutated.nt").string(), "--shapes", data_path("shapes.json"),
                            "--json"});
  CHECK(bad.code == kwg::cli::kValidationFailure);
  const auto report = nlohmann::json::parse(bad.out);
  CHECK(report["conforms"] == false);
  CHECK(report["violations"].size() == 1);
}

TEST_CASE("query runs against a graph file") {
  const auto full = scratch("q.nt");
  REQUIRE(kwg_cli({"export", "--config", data_path("louisiana/run.json"), "--out", full.string()}).code == 0);
  const auto r = kwg_cli({"query", data_path("queries/vulnerability_by_cell.rq"), "--graph", full.string()});
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["rows"].size() == 5);
  const auto bad = scratch("bad.rq");
  std::ofstream(bad) << "SELECT * WHERE { ?s ?p }";
  CHECK(kwg_cli({"query", bad.string(), "--graph", full.string()}).code == kwg::cli::kDataError);
}
