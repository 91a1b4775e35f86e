// One PASS/FAIL line per acceptance criterion; exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "briefing_oracle.hpp"
#include "fixture.hpp"
#include "kwg/dgg.hpp"
#include "kwg/geometry.hpp"
#include "kwg/ingest.hpp"
#include "kwg/pipeline.hpp"
#include "kwg/query.hpp"
#include "kwg/service.hpp"
#include "kwg/store.hpp"
#include "kwg/validate.hpp"
#include "oracles.hpp"
#include "query_oracle.hpp"

using namespace kwg;
using testing::data_path;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass;
  std::string detail;
};

template <class Rows>
Rows sorted(Rows r) {
  std::sort(r.begin(), r.end());
  return r;
}

std::shared_ptr<const TripleStore> fixture_store() { return testing::fixture_store(); }

const std::vector<Triple>& fixture_graph() {
  static const std::vector<Triple> g = fixture_store()->triples();
  return g;
}



// ------------------------------------------------------------ 1

Outcome vulnerability_query() {
  const std::string text = ingest::read_file(data_path("queries/vulnerability_by_cell.rq"));
  const auto st = fixture_store();
  const auto t0 = Clock::now();
  const query::Query q = query::parse_query(text);
  const auto got = query::evaluate(q, *st);
  const double secs = seconds_since(t0);

  test::RawQuery raw;
  auto pos = [](const query::PatternTerm& t) {
    if (const auto* v = std::get_if<query::Variable>(&t)) return test::RawPos{v->name, Term::iri("urn:unused")};
    return test::RawPos{std::nullopt, std::get<Term>(t)};
  };
  for (const auto& p : q.patterns) raw.patterns.push_back({pos(p.subject), pos(p.predicate), pos(p.object)});
  const auto expect = test::nested_loop(raw, fixture_graph());

  std::ostringstream d;
  d << q.patterns.size() << " patterns, " << got.rows.size() << " rows (oracle " << expect.size() << "), " << secs * 1e3
    << " ms";
  return {q.patterns.size() == 7 && got.rows.size() == 5 && sorted(got.rows) == sorted(expect) && secs < 1.0, d.str()};
}

// ------------------------------------------------------------ 2

Outcome level13_area() {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> face(0, 5);
  std::uniform_int_distribution<std::uint32_t> idx(0, (1u << 13) - 1);
  const int n = 20000;
  double sum = 0;
  for (int k = 0; k < n; ++k) sum += dgg::cell_area_km2(dgg::CellId::from_face_ij(face(rng), 13, idx(rng), idx(rng)));
  const double mean = sum / n;
  std::ostringstream d;
  d << "mean " << mean << " km2 over " << n << " sampled cells";
  return {std::abs(mean - 1.2668) / 1.2668 <= 0.01, d.str()};
}

// ------------------------------------------------------------ 3

Outcome dgg_structure() {
  // counts by expansion from the faces
  std::vector<std::size_t> counts;
  std::vector<dgg::CellId> layer;
  for (int f = 0; f < 6; ++f) layer.push_back(dgg::CellId::face_cell(f));
  for (int level = 0; level <= 3; ++level) {
    counts.push_back(std::set<dgg::CellId>(layer.begin(), layer.end()).size());
    std::vector<dgg::CellId> next;
    for (const auto& c : layer) {
      for (const auto& k : c.children()) next.push_back(k);
    }
    layer = std::move(next);
  }
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> lv(1, 10);
  int failures = 0;
  for (int k = 0; k < 10000; ++k) {
    const LatLng p = test::random_sphere_point(rng);
    const int level = lv(rng);
    const auto c = dgg::cell_from_point(p, level);
    if (dgg::cell_from_point(p, level - 1) != c.parent() || !c.parent().contains(c)) ++failures;
  }
  double total = 0;
  for (const auto& c : dgg::cells_at_level(2)) total += dgg::cell_area_km2(c);
  const double sphere = 4 * kPi * dgg::kEarthRadiusKm * dgg::kEarthRadiusKm;
  const double rel = std::abs(total - sphere) / sphere;
  std::ostringstream d;
  d << "counts " << counts[0] << "/" << counts[1] << "/" << counts[2] << "/" << counts[3] << ", " << failures
    << " hierarchy failures, level-2 area off by " << rel * 100 << "%";
  return {counts == std::vector<std::size_t>{6, 24, 96, 384} && failures == 0 && rel < 1e-3, d.str()};
}

// ------------------------------------------------------------ 4

Outcome de9im_oracle() {
  int disagreements = 0, partition = 0;
  for (const auto& [ra, rb] : test::random_rect_pairs(100, 77)) {
    const Geometry a = ra.geometry(), b = rb.geometry();
    const DE9IM expected = test::rect_sampling_oracle(ra, rb);
    for (auto p : kAllPredicates) disagreements += predicate(a, b, p) != test::oracle_predicate_areal(expected, p);
    // exactly one RCC-8 relation holds, and it is the one reported
    const RCC8 r = rcc8_of(a, b);
    int holding = 0;
    const bool eq = test::oracle_predicate_areal(expected, SpatialPredicate::Equals);
    const bool inside = test::oracle_predicate_areal(expected, SpatialPredicate::Within) && !eq;
    const bool covers = test::oracle_predicate_areal(expected, SpatialPredicate::Contains) && !eq;
    const bool boundary_contact = expected.at(Location::Boundary, Location::Boundary) >= 0;
    const std::map<RCC8, bool> holds = {
        {RCC8::DC, test::oracle_predicate_areal(expected, SpatialPredicate::Disjoint)},
        {RCC8::EC, test::oracle_predicate_areal(expected, SpatialPredicate::Touches)},
        {RCC8::PO, test::oracle_predicate_areal(expected, SpatialPredicate::Overlaps)},
        {RCC8::EQ, eq},
        {RCC8::TPP, inside && boundary_contact},
        {RCC8::NTPP, inside && !boundary_contact},
        {RCC8::TPPi, covers && boundary_contact},
        {RCC8::NTPPi, covers && !boundary_contact},
    };
    for (const auto& [rel, h] : holds) holding += h;
    partition += holding != 1 || !holds.at(r);
  }
  std::ostringstream d;
  d << disagreements << " of 800 predicate disagreements, " << partition << " RCC-8 partition failures";
  return {disagreements == 0 && partition == 0, d.str()};
}

// ------------------------------------------------------------ 5

// Triple counts restated from the emission rules, entity by entity.
std::size_t formula_count(const ingest::Entities& e) {
  auto temporal = [](const TemporalEntity& t) -> std::size_t { return std::holds_alternative<Instant>(t) ? 2 : 7; };
  std::size_t n = 0;
  std::set<std::pair<std::string, FeatureKind>> classes;
  for (const auto& f : e.features) {
    n += 2;
    if (f.geometry) n += 3;
    if (f.temporal_scope) n += 1 + temporal(*f.temporal_scope);
    classes.emplace(f.class_iri, f.kind);
  }
  for (const auto& [cls, kind] : classes) n += 2 + (cls != kind_class(kind));
  for (const auto& c : e.observation_classes) n += c != rdf::iri(rdf::ns::sosa, "Observation");
  for (const auto& p : e.properties) n += 2 + !p.label.empty();
  const auto& d = e.dataset;
  n += 4 + !d.license.empty() + !d.creator.empty() + !d.retrieval_date.empty() + 2;
  for (const auto& c : e.collections) n += 2 + c.members.size();
  for (const auto& o : e.observations) {
    n += 3 + (std::holds_alternative<SimpleResult>(o.result) ? 1 : 4);
    if (o.phenomenon_time) n += 1 + temporal(*o.phenomenon_time);
    n += o.result_time.has_value() + o.sensor.has_value();
    n += 1;  // back-link from the feature of interest
  }
  return n;
}

Outcome ingestion_counting() {
  std::ostringstream d;
  bool ok = true;
  for (const std::string id : {"svi", "hurricanes"}) {
    const auto table = ingest::read_table(data_path("louisiana/" + id + ".csv"));
    const auto mapping = ingest::parse_mapping(ingest::read_json(data_path("louisiana/" + id + ".mapping.json")));
    const auto manifest = ingest::parse_manifest(ingest::read_json(data_path("louisiana/" + id + ".manifest.json")));
    const auto e = ingest::ingest_table(table, mapping, manifest);
    std::size_t blanks = 0;
    for (const auto& pm : mapping.properties) {
      const auto col = std::find(table.header.begin(), table.header.end(), pm.column) - table.header.begin();
      for (const auto& row : table.rows) blanks += row[col].empty();
    }
    const std::size_t expect_obs = table.rows.size() * mapping.properties.size() - blanks;
    const auto triples = ingest::emit_entities(e);
    const std::size_t formula = formula_count(e);
    ok = ok && e.observations.size() == expect_obs && triples.size() == formula;
    d << id << ": " << e.observations.size() << " obs (N*M-blanks " << expect_obs << "), " << triples.size()
      << " triples (formula " << formula << "); ";
  }
  const auto cfg = pipeline::load_run_config(data_path("louisiana/run.json"));
  const auto a = rdf::serialize_ntriples(pipeline::build_graph(cfg));
  const auto b = rdf::serialize_ntriples(pipeline::build_graph(cfg));
  d << "double ingestion " << (a == b ? "identical" : "differs") << " (" << a.size() << " bytes)";
  return {ok && a == b, d.str()};
}

// ------------------------------------------------------------ 6

Outcome raster_means() {
  std::mt19937 rng(606);
  std::uniform_real_distribution<double> u(-10, 45);
  ingest::RasterLayer r;
  r.west = -91.5;
  r.east = -90.9;
  r.south = 30.1;
  r.north = 30.7;
  r.rows = r.cols = 50;
  for (int i = 0; i < 2500; ++i) r.values.push_back(u(rng));
  const int level = 10;
  const auto got = ingest::summarize_raster(r, level);

  // bucket every pixel centre into the first (smallest) cell containing it
  const auto candidates = dgg::cover_geometry(Geometry::rectangle(r.west, r.south, r.east, r.north), level);
  std::map<dgg::CellId, std::pair<double, int>> acc;
  int orphans = 0;
  for (int row = 0; row < r.rows; ++row) {
    for (int col = 0; col < r.cols; ++col) {
      const LatLng p = r.pixel_center(row, col);
      auto it = std::find_if(candidates.begin(), candidates.end(), [&](const auto& c) { return dgg::cell_contains(c, p); });
      if (it == candidates.end()) {
        ++orphans;
        continue;
      }
      acc[*it].first += r.at(row, col);
      ++acc[*it].second;
    }
  }
  int bad = 0;
  double worst = 0;
  for (const auto& s : got) {
    auto it = acc.find(s.cell);
    if (it == acc.end()) {
      ++bad;
      continue;
    }
    const double expect = it->second.first / it->second.second;
    const double rel = std::abs(s.value - expect) / std::abs(expect);
    worst = std::max(worst, rel);
    bad += rel > 1e-12;
  }
  std::ostringstream d;
  d << got.size() << " cells (oracle " << acc.size() << "), worst relative error " << worst;
  return {bad == 0 && orphans == 0 && got.size() == acc.size(), d.str()};
}

// ------------------------------------------------------------ 7

Outcome provenance_hops() {
  const auto st = fixture_store();
  const auto observations = st->match(std::nullopt, Term::iri(vocab::observed_property()), std::nullopt);
  std::size_t reached = 0, total = 0;
  for (const auto& t : observations) {
    if (t.subject.value().find("/collection.") != std::string::npos) continue;
    ++total;
    // observation -> property -> dataset -> organization
    std::vector<std::string> frontier{t.subject.value()};
    for (const auto& pred : {vocab::observed_property(), vocab::from_dataset(), vocab::source_organization()}) {
      std::vector<std::string> next;
      for (const auto& s : frontier) {
        for (const auto& u : st->match(Term::iri(s), Term::iri(pred), std::nullopt)) next.push_back(u.object.value());
      }
      frontier = std::move(next);
    }
    const bool is_org =
        frontier.size() == 1 &&
        st->contains({Term::iri(frontier[0]), Term::iri(vocab::rdf_type()), Term::iri(rdf::iri(rdf::ns::kwg_ont, "Organization"))});
    reached += is_org;
  }
  std::ostringstream d;
  d << reached << " of " << total << " observations reach an organization in 3 hops";
  return {total > 0 && reached == total, d.str()};
}

// ------------------------------------------------------------ 8

Outcome validation() {
  const auto shapes = validate::parse_shapes(ingest::read_json(data_path("shapes.json")));
  const auto& g = fixture_graph();
  auto run = [&](const std::vector<Triple>& graph) {
    TripleStore st;
    st.bulk_load(graph);
    return validate::validate(st, shapes);
  };
  const auto clean = run(g);

  auto without_first = [&](const std::function<bool(const Triple&)>& pick) {
    std::vector<Triple> out;
    bool done = false;
    for (const auto& t : g) {
      if (!done && pick(t)) {
        done = true;
        continue;
      }
      out.push_back(t);
    }
    return out;
  };
  const auto no_result = without_first([](const Triple& t) { return t.predicate.value() == vocab::has_simple_result(); });
  std::vector<Triple> string_value = g;
  for (auto& t : string_value) {
    if (t.predicate.value() == vocab::numeric_value()) {
      t.object = Term::literal(t.object.value());
      break;
    }
  }
  const auto no_cell_geometry = without_first([](const Triple& t) {
    return t.predicate.value() == vocab::has_geometry() && t.subject.value().find("/s2.level") != std::string::npos;
  });

  struct Case {
    const char* name;
    std::vector<validate::Violation> v;
    validate::ViolationKind expect;
  };
  const std::vector<Case> cases = {{"missing simple result", run(no_result), validate::ViolationKind::MinCount},
                                   {"string numeric value", run(string_value), validate::ViolationKind::Datatype},
                                   {"cell without geometry", run(no_cell_geometry), validate::ViolationKind::MinCount}};
  bool ok = clean.empty();
  std::ostringstream d;
  d << "fixture " << clean.size() << " violations";
  for (const auto& c : cases) {
    const bool hit = c.v.size() == 1 && c.v[0].kind == c.expect;
    ok = ok && hit;
    d << "; " << c.name << ": " << c.v.size() << (c.v.size() == 1 ? " " + std::string(validate::to_string(c.v[0].kind)) : "");
  }
  return {ok, d.str()};
}

// ------------------------------------------------------------ 9

Outcome store_soundness() {
  std::mt19937 rng(909);
  std::uniform_int_distribution<int> pick(0, 59);
  std::vector<Triple> graph;
  for (int i = 0; i < 3000; ++i) {
    Term o = (i % 3 == 0) ? Term::typed(std::to_string(pick(rng)), "integer") : Term::iri("http://t/n" + std::to_string(pick(rng)));
    graph.push_back({Term::iri("http://t/n" + std::to_string(pick(rng))), Term::iri("http://t/p" + std::to_string(pick(rng) % 5)), o});
  }
  TripleStore st;
  st.bulk_load(graph);
  std::sort(graph.begin(), graph.end());
  graph.erase(std::unique(graph.begin(), graph.end()), graph.end());
  std::uniform_int_distribution<std::size_t> which(0, graph.size() - 1);
  std::uniform_int_distribution<int> coin(0, 1);
  int match_failures = 0;
  for (int k = 0; k < 1000; ++k) {
    const Triple& seed = graph[which(rng)];
    std::optional<Term> s, p, o;
    if (coin(rng)) s = seed.subject;
    if (coin(rng)) p = seed.predicate;
    if (coin(rng)) o = seed.object;
    std::vector<Triple> expect;
    for (const auto& t : graph) {
      if ((!s || t.subject == *s) && (!p || t.predicate == *p) && (!o || t.object == *o)) expect.push_back(t);
    }
    match_failures += sorted(st.match(s, p, o)) != expect;
  }

  std::mt19937 qrng(910);
  int query_failures = 0;
  for (int i = 0; i < 50; ++i) {
    const auto qgraph = test::random_query_graph(qrng, 250);
    TripleStore qs;
    qs.bulk_load(qgraph);
    const auto raw = test::random_query(qrng);
    query_failures += sorted(query::evaluate(query::parse_query(test::render(raw)), qs).rows) !=
                      sorted(test::nested_loop(raw, qgraph));
  }
  std::ostringstream d;
  d << match_failures << " of 1000 match/scan mismatches, " << query_failures << " of 50 query/oracle mismatches";
  return {match_failures == 0 && query_failures == 0 && st.indexes_coherent(), d.str()};
}

// ------------------------------------------------------------ 10

Outcome briefing() {
  service::Service svc(fixture_store());
  std::ostringstream d;
  bool ok = true;
  double worst = 0;
  for (const char* county : {testing::kCountyA, testing::kCountyB, "Earth.NA.US.USA.25.4_1"}) {
    const auto t0 = Clock::now();
    const auto r = svc.briefing({{"region", county}});
    worst = std::max(worst, seconds_since(t0));
    if (r.status != 200) {
      ok = false;
      d << county << " status " << r.status << "; ";
      continue;
    }
    const auto b = nlohmann::json::parse(r.body);
    const auto got = testing::digest_of(b);
    const auto expect = testing::digest_from_queries(*fixture_store(), mint_iri(MintKind::Region, county));
    const bool same = got == expect && !got.obs.empty();
    ok = ok && same;
    d << county << " " << got.features.size() << " features/" << got.obs.size() << " obs " << (same ? "match" : "DIFFER")
      << "; ";
  }
  d << "worst latency " << worst * 1e3 << " ms";
  return {ok && worst < 1.0, d.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"vulnerability query replication", vulnerability_query},
      {"level-13 cell size", level13_area},
      {"DGG structure", dgg_structure},
      {"DE-9IM oracle agreement", de9im_oracle},
      {"ingestion counting", ingestion_counting},
      {"raster summarization", raster_means},
      {"provenance path", provenance_hops},
      {"validation", validation},
      {"store soundness", store_soundness},
      {"service briefing", briefing},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
