#include <doctest.h>
#include <httplib.h>

#include <algorithm>
#include <thread>

#include "briefing_oracle.hpp"
#include "fixture.hpp"
#include "kwg/dgg.hpp"
#include "kwg/geojson.hpp"
#include "kwg/ingest.hpp"
#include "kwg/service.hpp"

using namespace kwg;
using namespace kwg::service;
using nlohmann::json;

namespace {

std::string region_iri(const char* key) { return mint_iri(MintKind::Region, key); }

bool has_feature(const json& b, const std::string& iri) {
  return std::any_of(b["features"].begin(), b["features"].end(), [&](const json& f) { return f["iri"] == iri; });
}

bool has_hazard(const json& b) {
  return std::any_of(b["features"].begin(), b["features"].end(), [](const json& f) { return f["kind"] == "Hazard"; });
}

const json* group(const json& b, const std::string& local) {
  for (const auto& g : b["observations"]) {
    if (g["property"].get<std::string>().ends_with(local)) return &g;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("briefing of a county cell lists the county and its vulnerability") {
  Service svc(testing::fixture_store());
  const auto r = svc.briefing({{"cell", dgg::token(testing::county_a_cell())}});
  REQUIRE(r.status == 200);
  const json b = json::parse(r.body);
  CHECK(b["target"]["kind"] == "Cell");
  CHECK(has_feature(b, region_iri(testing::kCountyA)));
  CHECK(has_feature(b, region_iri(testing::kState)));
  CHECK_FALSE(has_feature(b, region_iri(testing::kCountyB)));
  const json* svi = group(b, "socialVulnerabilityIndex");
  REQUIRE(svi != nullptr);
  REQUIRE((*svi)["observations"].size() == 1);
  CHECK((*svi)["observations"][0]["foi"] == region_iri(testing::kCountyA));
  CHECK((*svi)["observations"][0]["result"] == "0.8123");
  bool provenance = false;
  for (const auto& p : b["provenance"]) {
    if (p["property"] == (*svi)["property"]) provenance = p["organization_label"] == "Centers for Disease Control and Prevention";
  }
  CHECK(provenance);
  CHECK(b["experts"].empty());
}

TEST_CASE("briefing of an ocean cell is empty") {
  Service svc(testing::fixture_store());
  const auto r = svc.briefing({{"cell", dgg::token(dgg::cell_from_point({0.0, -140.0}, 13))}});
  REQUIRE(r.status == 200);
  const json b = json::parse(r.body);
  CHECK(b["features"].empty());
  CHECK(b["observations"].empty());
  CHECK(b["provenance"].empty());
}

TEST_CASE("time window filters hazards") {
  Service svc(testing::fixture_store());
  const auto all = json::parse(svc.briefing({{"region", testing::kCountyA}}).body);
  REQUIRE(has_hazard(all));
  const auto during = json::parse(svc.briefing({{"region", testing::kCountyA}, {"from", "2021-08-30"}}).body);
  CHECK(has_hazard(during));
  const auto later = json::parse(svc.briefing({{"region", testing::kCountyA}, {"from", "2022-01-01"}}).body);
  CHECK_FALSE(has_hazard(later));
  // the 2018 SVI observation is outside the window as well
  CHECK(group(later, "socialVulnerabilityIndex") == nullptr);
  CHECK(later["window"]["from"] == "2022-01-01T00:00:00Z");
}

TEST_CASE("briefing target errors") {
  Service svc(testing::fixture_store());
  CHECK(svc.briefing({}).status == 400);
  CHECK(svc.briefing({{"cell", "9-2-01"}}).status == 400);
  CHECK(svc.briefing({{"cell", "banana"}}).status == 400);
  CHECK(svc.briefing({{"region", "Earth.Nowhere_9"}}).status == 404);
  CHECK(svc.briefing({{"region", "nope:thing"}}).status == 400);
  CHECK(svc.briefing({{"region", testing::kCountyA}, {"from", "2022-01-01"}, {"to", "2021-01-01"}}).status == 400);
  CHECK(svc.briefing({{"region", testing::kCountyA}, {"from", "yesterday"}}).status == 400);
  // region given as CURIE and as IRI resolve to the same target
  const auto a = json::parse(svc.briefing({{"region", std::string("kwgr:") + testing::kCountyA}}).body);
  const auto b = json::parse(svc.briefing({{"region", "<" + region_iri(testing::kCountyA) + ">"}}).body);
  CHECK(a == b);
}

TEST_CASE("briefing equals the documented queries") {
  const auto st = testing::fixture_store();
  for (const std::string t : {region_iri(testing::kCountyA), region_iri(testing::kCountyB), region_iri(testing::kState),
                              mint_iri(MintKind::Cell, dgg::token(testing::county_a_cell()))}) {
    CAPTURE(t);
    const json b = build_briefing(*st, Target{t, std::nullopt}, std::nullopt);
    CHECK_FALSE(b["observations"].empty());
    CHECK(testing::digest_of(b) == testing::digest_from_queries(*st, t));
  }
}

TEST_CASE("compare pairs shared properties") {
  Service svc(testing::fixture_store());
  const auto r = svc.compare({{"a", testing::kCountyA}, {"b", testing::kCountyB}});
  REQUIRE(r.status == 200);
  const json c = json::parse(r.body);
  bool svi = false;
  for (const auto& row : c["table"]) {
    if (row["property"].get<std::string>().ends_with("socialVulnerabilityIndex")) {
      svi = true;
      CHECK(row["a"][0]["result"] == "0.8123");
      CHECK(row["b"][0]["result"] == "0.4410");
    }
  }
  CHECK(svi);

  const json same = json::parse(svc.compare({{"a", testing::kCountyA}, {"b", testing::kCountyA}}).body);
  CHECK(same["a"] == same["b"]);
  for (const auto& row : same["table"]) CHECK(row["a"] == row["b"]);

  CHECK(svc.compare({{"a", testing::kCountyA}}).status == 400);
  CHECK(svc.compare({{"a", testing::kCountyA}, {"b", "Earth.Nowhere_9"}}).status == 404);
  // a cell token is accepted as well
  CHECK(svc.compare({{"a", dgg::token(testing::county_a_cell())}, {"b", testing::kCountyB}}).status == 200);
}

TEST_CASE("cells endpoint matches the cover") {
  Service svc(testing::fixture_store());
  const auto r = svc.cells({{"bbox", "-92,30,-91,31"}, {"level", "6"}});
  REQUIRE(r.status == 200);
  CHECK(r.content_type == "application/geo+json");
  const json fc = json::parse(r.body);
  CHECK(fc["type"] == "FeatureCollection");
  const auto cover = dgg::cover_geometry(Geometry::rectangle(-92, 30, -91, 31), 6);
  REQUIRE(fc["features"].size() == cover.size());
  for (std::size_t k = 0; k < cover.size(); ++k) {
    const auto& f = fc["features"][k];
    CHECK(f["properties"]["token"] == dgg::token(cover[k]));
    CHECK(f["properties"]["level"] == 6);
    CHECK(f["geometry"] == geojson::from_geometry(dgg::cell_geometry(cover[k])));
  }

  CHECK(svc.cells({{"bbox", "-92,30,-91"}, {"level", "6"}}).status == 400);
  CHECK(svc.cells({{"bbox", "-91,30,-92,31"}, {"level", "6"}}).status == 400);
  CHECK(svc.cells({{"bbox", "-92,30,-91,31"}, {"level", "x"}}).status == 400);
  CHECK(svc.cells({{"bbox", "-92,30,-91,31"}, {"level", "31"}}).status == 400);
  CHECK(svc.cells({{"bbox", "-180,-90,180,90"}, {"level", "12"}}).status == 400);
}

TEST_CASE("query endpoint and errors") {
  Service svc(testing::fixture_store());
  const auto r = svc.query(ingest::read_file(testing::data_path("queries/vulnerability_by_cell.rq")));
  REQUIRE(r.status == 200);
  const json j = json::parse(r.body);
  CHECK(j["rows"].size() == 5);
  CHECK(j["head"]["vars"].size() == 4);

  const auto bad = svc.query("SELECT * WHERE { ?s ?p }");
  CHECK(bad.status == 400);
  CHECK(json::parse(bad.body).contains("line"));
  const auto unsupported = svc.query("SELECT * WHERE { ?s ?p ?o } ORDER BY ?s");
  CHECK(unsupported.status == 422);
  CHECK(json::parse(unsupported.body)["token"] == "ORDER");
}

TEST_CASE("datasets and health") {
  Service svc(testing::fixture_store());
  const json d = json::parse(svc.datasets().body);
  REQUIRE(d["datasets"].size() == 4);
  std::set<std::string> orgs;
  for (const auto& ds : d["datasets"]) orgs.insert(ds["organization"]["label"].get<std::string>());
  CHECK(orgs == std::set<std::string>{"Centers for Disease Control and Prevention", "GADM", "National Hurricane Center", "PRISM Climate Group"});
  const json h = json::parse(svc.health().body);
  CHECK(h["status"] == "ok");
  CHECK(h["triples"] == testing::fixture_store()->size());
}

TEST_CASE("http server round trip") {
  Service svc(testing::fixture_store());
  int reloads = 0;
  HttpServer server(svc, [&] {
    ++reloads;
    return testing::fixture_store();
  });
  const int port = server.bind("127.0.0.1", 0);
  REQUIRE(port > 0);
  std::thread t([&] { server.listen(); });

  httplib::Client cli("127.0.0.1", port);
  cli.set_connection_timeout(5);
  auto h = cli.Get("/health");
  REQUIRE(h);
  CHECK(h->status == 200);
  CHECK(h->get_header_value("Access-Control-Allow-Origin") == "*");

  auto b = cli.Get("/briefing?region=" + std::string(testing::kCountyA));
  REQUIRE(b);
  CHECK(b->status == 200);
  CHECK(json::parse(b->body)["target"]["iri"] == region_iri(testing::kCountyA));
  auto missing = cli.Get("/briefing");
  REQUIRE(missing);
  CHECK(missing->status == 400);

  auto q = cli.Post("/query", ingest::read_file(testing::data_path("queries/vulnerability_by_cell.rq")),
                    "application/sparql-query");
  REQUIRE(q);
  CHECK(q->status == 200);
  CHECK(json::parse(q->body)["rows"].size() == 5);

  auto pre = cli.Options("/query");
  REQUIRE(pre);
  CHECK(pre->status == 204);
  CHECK(pre->get_header_value("Access-Control-Allow-Methods").find("POST") != std::string::npos);

  auto rl = cli.Post("/admin/reload", "", "text/plain");
  REQUIRE(rl);
  CHECK(rl->status == 200);
  CHECK(reloads == 1);

  server.stop();
  t.join();
}
