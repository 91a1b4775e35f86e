#include <doctest.h>

#include <random>

#include "kwg/error.hpp"
#include "kwg/kgmodel.hpp"

using namespace kwg;
namespace ns = kwg::rdf::ns;

namespace {
std::string kont(const char* local) { return rdf::iri(ns::kwg_ont, local); }

std::size_t count_predicate(const std::vector<Triple>& ts, const std::string& p) {
  std::size_t n = 0;
  for (const auto& t : ts) n += t.predicate.value() == p;
  return n;
}
}  // namespace

TEST_CASE("namespace table expands and compacts") {
  CHECK(rdf::expand("kwg-ont:S2Cell") == "http://stko-kwg.geog.ucsb.edu/lod/ontology/S2Cell");
  CHECK(rdf::expand("qudt-unit:DEG_C") == "http://qudt.org/vocab/unit/DEG_C");
  CHECK(rdf::expand("<http://example.org/x>") == "http://example.org/x");
  CHECK_THROWS_AS(rdf::expand("nope:x"), Error);
  CHECK(rdf::compact("http://www.w3.org/ns/sosa/Observation") == "sosa:Observation");
  CHECK(rdf::compact("http://stko-kwg.geog.ucsb.edu/lod/resource/a%20b") == std::nullopt);
  CHECK(rdf::namespace_table().size() == 9);
}

TEST_CASE("region IRI uses the key verbatim") {
  CHECK(mint_iri(MintKind::Region, "Earth.NA.US.USA.19_1") ==
        "http://stko-kwg.geog.ucsb.edu/lod/resource/Earth.NA.US.USA.19_1");
  CHECK(mint_iri(MintKind::Region, "a b/c") == "http://stko-kwg.geog.ucsb.edu/lod/resource/a%20b%2Fc");
  CHECK(mint_iri(MintKind::Region, "x") == mint_iri(MintKind::Region, "x"));
  CHECK_THROWS_AS(mint_iri(MintKind::Region, ""), Error);
}

TEST_CASE("cell IRI carries the level") {
  const auto c = dgg::cell_from_point({30.45, -91.15}, 13);
  const std::string tok = dgg::token(c);
  CHECK(tok.starts_with("4-13-"));
  CHECK(mint_iri(MintKind::Cell, tok) == "http://stko-kwg.geog.ucsb.edu/lod/resource/s2.level13." + tok);
  CHECK_THROWS_AS(mint_iri(MintKind::Cell, "bogus"), Error);
}

TEST_CASE("cell feature emits exactly five triples") {
  const auto f = make_cell_feature(dgg::cell_from_point({30.45, -91.15}, 13));
  const auto ts = emit_feature(f);
  REQUIRE(ts.size() == 5);
  CHECK(ts[0].object.value() == kont("S2Cell"));
  CHECK(count_predicate(ts, vocab::rdfs_label()) == 1);
  CHECK(count_predicate(ts, vocab::has_geometry()) == 1);
  CHECK(count_predicate(ts, vocab::as_wkt()) == 1);
  const auto wkt = std::find_if(ts.begin(), ts.end(), [](const Triple& t) { return t.predicate.value() == vocab::as_wkt(); });
  CHECK(wkt->object.datatype() == vocab::wkt_literal());
  CHECK(parse_wkt(wkt->object.value()) == *f.geometry);
}

TEST_CASE("region without geometry has no geometry triple") {
  Feature f{mint_iri(MintKind::Region, "r1"), "r1", FeatureKind::Region, kont("AdminRegion_3"), {}, {}, "R1"};
  const auto ts = emit_feature(f);
  CHECK(ts.size() == 2);
  CHECK(count_predicate(ts, vocab::has_geometry()) == 0);
}

TEST_CASE("hazard interval scope") {
  Feature f{mint_iri(MintKind::Hazard, "ida"), "ida", FeatureKind::Hazard, kont("Hurricane"),
            Geometry::point({29.0, -90.0}), make_interval("2021-08-26T12:00:00Z", "2021-09-04"), "Ida"};
  const auto ts = emit_feature(f);
  CHECK(ts.size() == 5 + 1 + 7);
  CHECK(count_predicate(ts, vocab::has_temporal_scope()) == 1);
  CHECK(count_predicate(ts, vocab::has_beginning()) == 1);
  CHECK(count_predicate(ts, vocab::has_end()) == 1);
  for (const auto& t : ts) {
    if (t.predicate.value() == vocab::in_xsd_datetime()) {
      CHECK(t.object.datatype() == rdf::iri(ns::xsd, "dateTime"));
    }
  }
  CHECK_THROWS_AS(make_interval("2021-09-04", "2021-08-26"), Error);
}

TEST_CASE("datetime parsing") {
  CHECK(parse_datetime("2021-08-29").lexical == "2021-08-29T00:00:00Z");
  CHECK(parse_datetime("1970-01-01T00:00:00Z").epoch_seconds == 0.0);
  CHECK(parse_datetime("1970-01-01T01:00:00+01:00").epoch_seconds == 0.0);
  CHECK(parse_datetime("2000-03-01T00:00:00Z").epoch_seconds == 951868800.0);
  CHECK_THROWS_AS(parse_datetime("2021-02-29"), Error);
  CHECK_NOTHROW(parse_datetime("2020-02-29"));
  CHECK_THROWS_AS(parse_datetime("yesterday"), Error);
  CHECK(temporal_overlaps(make_interval("2021-01-01", "2021-02-01"), make_instant("2021-02-01")));
  CHECK_FALSE(temporal_overlaps(make_interval("2021-01-01", "2021-02-01"), make_instant("2021-02-02")));
}

TEST_CASE("observation emission") {
  const std::string foi = mint_iri(MintKind::Region, "c1");
  const std::string prop = kont("socialVulnerabilityIndex");
  EntityIndex known{foi, prop};
  Observation o;
  o.iri = mint_iri(MintKind::Observation, observation_key("svi", "c1", prop));
  o.feature_of_interest = foi;
  o.observed_property = prop;
  o.class_iri = kont("VulnerabilityObservation");
  o.result = SimpleResult{"0.42", rdf::iri(ns::xsd, "decimal")};

  SUBCASE("simple result without times is four triples") {
    const auto ts = emit_observation(o, known);
    CHECK(ts.size() == 4);
    CHECK(observation_triple_count(o) == 4);
    CHECK(o.iri == "http://stko-kwg.geog.ucsb.edu/lod/resource/observation.svi.c1.socialVulnerabilityIndex");
  }
  SUBCASE("quantity result node") {
    o.result = QuantityValue{21.5, rdf::iri(ns::qudt_unit, "DEG_C")};
    const auto ts = emit_observation(o, known);
    CHECK(ts.size() == observation_triple_count(o));
    CHECK(count_predicate(ts, vocab::numeric_value()) == 1);
    CHECK(count_predicate(ts, vocab::unit()) == 1);
    for (const auto& t : ts) {
      if (t.predicate.value() == vocab::numeric_value()) {
        CHECK(t.object.value() == "21.5");
        CHECK(t.object.numeric() == 21.5);
      }
    }
  }
  SUBCASE("times and sensor are counted") {
    o.phenomenon_time = make_interval("2020-01-01", "2020-12-31");
    o.result_time = parse_datetime("2021-01-05");
    o.sensor = mint_iri(MintKind::Region, "sensor1");
    CHECK(emit_observation(o, known).size() == observation_triple_count(o));
    CHECK(observation_triple_count(o) == 4 + 8 + 1 + 1);
  }
  SUBCASE("dangling references") {
    known.erase(foi);
    try {
      emit_observation(o, known);
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("dangling FOI") != std::string::npos);
      CHECK(e.kind() == ErrorKind::Data);
    }
    known.insert(foi);
    known.erase(prop);
    CHECK_THROWS_AS(emit_observation(o, known), Error);
  }
}

TEST_CASE("spatial relation emission") {
  const std::string cell = "http://stko-kwg.geog.ucsb.edu/lod/resource/s2.level13.4-13-0";
  const std::string county = mint_iri(MintKind::Region, "c1");
  auto ts = emit_spatial_relation(cell, SpatialPredicate::Within, county);
  REQUIRE(ts.size() == 2);
  CHECK(ts[0] == Triple{Term::iri(cell), Term::iri(kont("sfWithin")), Term::iri(county)});
  CHECK(ts[1] == Triple{Term::iri(county), Term::iri(kont("sfContains")), Term::iri(cell)});

  ts = emit_spatial_relation(cell, SpatialPredicate::Touches, county);
  REQUIRE(ts.size() == 2);
  CHECK(ts[1] == Triple{Term::iri(county), Term::iri(kont("sfTouches")), Term::iri(cell)});

  CHECK(emit_spatial_relation(cell, SpatialPredicate::Disjoint, county).empty());

  ts = emit_spatial_relation(county, SpatialPredicate::Within, "http://x/state", RelationScope::RegionRegion);
  CHECK(ts.size() == 4);
  CHECK(count_predicate(ts, rdf::iri(ns::geo, "sfWithin")) == 1);
  CHECK(count_predicate(ts, rdf::iri(ns::geo, "sfContains")) == 1);
}

TEST_CASE("provenance chain is three hops") {
  DatasetSubgraph d{mint_iri(MintKind::Dataset, "svi"), "svi", "SVI", "CDC", mint_iri(MintKind::Organization, "cdc"),
                    "public", "", "2022-01-01"};
  ObservableProperty p{kont("socialVulnerabilityIndex"), "SVI", d.iri};
  auto ts = emit_property(p);
  auto more = emit_dataset(d);
  ts.insert(ts.end(), more.begin(), more.end());
  std::string at = p.iri;
  for (const auto& pred : {vocab::from_dataset(), vocab::source_organization()}) {
    for (const auto& t : ts) {
      if (t.subject.value() == at && t.predicate.value() == pred) {
        at = t.object.value();
        break;
      }
    }
  }
  CHECK(at == d.organization_iri);
}

TEST_CASE("theme is a plain string") {
  ThematicSubgraph t{mint_iri(MintKind::Theme, "social"), "social", {mint_iri(MintKind::Dataset, "svi")}};
  const auto ts = emit_theme(t);
  CHECK(ts.size() == 3);
  CHECK(ts[1].object.datatype() == rdf::iri(ns::xsd, "string"));
}

TEST_CASE("n-triples serialization") {
  CHECK(rdf::serialize_ntriples({}).empty());
  CHECK(rdf::serialize_turtle({}).empty());

  std::vector<Triple> ts = emit_feature(make_cell_feature(dgg::cell_from_point({30.45, -91.15}, 13)));
  ts.push_back({Term::iri("http://a/x"), Term::iri("http://a/p"), Term::literal("line\n\"quoted\"\t\\ ü")});
  ts.push_back(ts.front());  // duplicate
  const std::string nt = rdf::serialize_ntriples(ts);
  CHECK(std::count(nt.begin(), nt.end(), '\n') == 6);
  auto shuffled = ts;
  std::shuffle(shuffled.begin(), shuffled.end(), std::mt19937(3));
  CHECK(rdf::serialize_ntriples(shuffled) == nt);

  auto back = rdf::parse_ntriples(nt);
  std::sort(back.begin(), back.end());
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  CHECK(back == ts);

  const std::string ttl = rdf::serialize_turtle(ts);
  CHECK(ttl.find("@prefix kwg-ont: <http://stko-kwg.geog.ucsb.edu/lod/ontology/> .") != std::string::npos);
  CHECK(ttl.find(" a kwg-ont:S2Cell") != std::string::npos);
}

TEST_CASE("n-triples parse errors carry positions") {
  try {
    rdf::parse_ntriples("<http://a> <http://b> <http://c> .\n<http://a> <http://b> \"x .\n");
    FAIL("expected parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(rdf::parse_ntriples("<http://a> <http://b> \"x\"@en ."), ParseError);
  CHECK_THROWS_AS(rdf::parse_ntriples("<http://a> <http://b> \"abc\"^^<http://www.w3.org/2001/XMLSchema#integer> ."),
                  ParseError);
  CHECK(rdf::parse_ntriples("# comment\n\n<http://a> <http://b> _:n1 . # tail\n").size() == 1);
}

TEST_CASE("numeric literals") {
  CHECK(Term::typed("42", "integer").numeric() == 42.0);
  CHECK(Term::typed("-0.5", "decimal").numeric() == -0.5);
  CHECK(Term::typed("1e3", "double").numeric() == 1000.0);
  CHECK_THROWS_AS(Term::typed("1.5", "integer"), Error);
  CHECK_FALSE(Term::literal("12").numeric());
}
