#include "kwg/service.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "kwg/dgg.hpp"
#include "kwg/error.hpp"
#include "kwg/geojson.hpp"
#include "kwg/query.hpp"

namespace kwg::service {

using nlohmann::json;

namespace {

Term iri(const std::string& s) { return Term::iri(s); }

std::vector<Term> objects(const TripleStore& st, const std::string& s, const std::string& p) {
  std::vector<Term> out;
  for (const auto& t : st.match(iri(s), iri(p), std::nullopt)) out.push_back(t.object);
  return out;
}

std::optional<Term> object(const TripleStore& st, const std::string& s, const std::string& p) {
  auto os = objects(st, s, p);
  if (os.empty()) return std::nullopt;
  return *std::min_element(os.begin(), os.end());
}

std::string object_value(const TripleStore& st, const std::string& s, const std::string& p) {
  auto o = object(st, s, p);
  return o ? o->value() : std::string();
}

std::vector<std::string> subjects(const TripleStore& st, const std::string& p, const Term& o) {
  std::vector<std::string> out;
  for (const auto& t : st.match(std::nullopt, iri(p), o)) out.push_back(t.subject.value());
  std::sort(out.begin(), out.end());
  return out;
}

// Walks rdfs:subClassOf upwards until a kind class is met.
std::string kind_of_class(const TripleStore& st, const std::string& cls) {
  static const std::set<std::string> kinds = {kind_class(FeatureKind::Hazard), kind_class(FeatureKind::Region),
                                              kind_class(FeatureKind::Cell)};
  std::set<std::string> seen;
  std::vector<std::string> stack{cls};
  while (!stack.empty()) {
    const std::string c = stack.back();
    stack.pop_back();
    if (kinds.contains(c)) return std::string(rdf::local_name(c));
    if (!seen.insert(c).second) continue;
    for (const auto& o : objects(st, c, vocab::rdfs_subclass_of())) stack.push_back(o.value());
  }
  return "";
}

DateTime bound_time(double epoch) { return DateTime{"", epoch}; }

// Temporal entity attached to `node` through `predicate`, if any.
std::optional<TemporalEntity> temporal_of(const TripleStore& st, const std::string& node, const std::string& predicate) {
  const auto t = object(st, node, predicate);
  if (!t || !t->is_iri()) return std::nullopt;
  const std::string dt = object_value(st, t->value(), vocab::in_xsd_datetime());
  if (!dt.empty()) return make_instant(dt);
  const auto b = object(st, t->value(), vocab::has_beginning());
  const auto e = object(st, t->value(), vocab::has_end());
  if (!b || !e) return std::nullopt;
  return make_interval(object_value(st, b->value(), vocab::in_xsd_datetime()),
                       object_value(st, e->value(), vocab::in_xsd_datetime()));
}

json temporal_json(const std::optional<TemporalEntity>& t) {
  if (!t) return nullptr;
  if (const auto* i = std::get_if<Instant>(&*t)) return {{"instant", i->at.lexical}};
  const auto& iv = std::get<Interval>(*t);
  return {{"begin", iv.begin.lexical}, {"end", iv.end.lexical}};
}

bool in_window(const std::optional<TemporalEntity>& t, const std::optional<Interval>& window) {
  return !t || !window || temporal_overlaps(*t, *window);
}

json describe(const TripleStore& st, const std::string& node) {
  const std::string cls = object_value(st, node, vocab::rdf_type());
  return {{"iri", node},
          {"class", cls},
          {"kind", cls.empty() ? "" : kind_of_class(st, cls)},
          {"label", object_value(st, node, vocab::rdfs_label())}};
}

Response json_response(int status, const json& j) { return {status, j.dump(), "application/json"}; }
Response error_response(int status, const std::string& message, json extra = json::object()) {
  extra["error"] = message;
  return json_response(status, extra);
}

std::optional<std::string> param(const Params& p, const char* key) {
  auto it = p.find(key);
  if (it == p.end()) return std::nullopt;
  return it->second;
}

}  // namespace

const std::vector<SpatialPredicate>& briefing_predicates() {
  static const std::vector<SpatialPredicate> ps = {SpatialPredicate::Equals,   SpatialPredicate::Within,
                                                   SpatialPredicate::Contains, SpatialPredicate::Overlaps,
                                                   SpatialPredicate::Crosses,  SpatialPredicate::Touches,
                                                   SpatialPredicate::Intersects};
  return ps;
}

// ------------------------------------------------------------ targets

Target resolve_target(const TripleStore& st, const std::optional<std::string>& cell,
                      const std::optional<std::string>& region) {
  if (cell && region) throw RequestError(400, "give either 'cell' or 'region', not both");
  if (cell) {
    try {
      const auto c = dgg::cell_from_token(*cell);
      return Target{mint_iri(MintKind::Cell, dgg::token(c)), dgg::token(c)};
    } catch (const Error& e) {
      throw RequestError(400, std::string("bad cell token: ") + e.what());
    }
  }
  if (!region || region->empty()) throw RequestError(400, "missing 'cell' or 'region' parameter");
  std::string resolved;
  try {
    if (region->find("://") != std::string::npos && region->front() != '<') {
      resolved = *region;
    } else if (region->front() == '<' || region->find(':') != std::string::npos) {
      resolved = rdf::expand(*region);
    } else {
      resolved = mint_iri(MintKind::Region, *region);
    }
    Term::iri(resolved);
  } catch (const Error& e) {
    throw RequestError(400, std::string("bad region: ") + e.what());
  }
  if (st.match(Term::iri(resolved), std::nullopt, std::nullopt).empty()) {
    throw RequestError(404, "unknown region <" + resolved + ">");
  }
  return Target{resolved, std::nullopt};
}

Target resolve_any(const TripleStore& st, const std::string& ref) {
  try {
    dgg::cell_from_token(ref);
    return resolve_target(st, ref, std::nullopt);
  } catch (const Error&) {
    return resolve_target(st, std::nullopt, ref);
  }
}

std::optional<Interval> parse_window(const std::optional<std::string>& from, const std::optional<std::string>& to) {
  if (!from && !to) return std::nullopt;
  Interval w{bound_time(-1e18), bound_time(1e18)};
  try {
    if (from) w.begin = parse_datetime(*from);
    if (to) w.end = parse_datetime(*to);
  } catch (const Error& e) {
    throw RequestError(400, std::string("bad time window: ") + e.what());
  }
  if (w.begin.epoch_seconds > w.end.epoch_seconds) throw RequestError(400, "time window begins after it ends");
  return w;
}

// ------------------------------------------------------------ briefing

json build_briefing(const TripleStore& st, const Target& target, const std::optional<Interval>& window) {
  json out;
  json t = describe(st, target.iri);
  if (target.token) {
    t["token"] = *target.token;
    t["kind"] = "Cell";
  }
  out["target"] = t;
  out["window"] = window ? json{{"from", window->begin.lexical}, {"to", window->end.lexical}} : json(nullptr);

  // Related features, one entry per (feature, relation).
  std::vector<std::string> fois{target.iri};
  std::set<std::string> foi_set{target.iri};
  json features = json::array();
  std::vector<std::pair<std::string, SpatialPredicate>> related;
  for (SpatialPredicate p : briefing_predicates()) {
    for (const auto& o : objects(st, target.iri, vocab::sf(p))) related.emplace_back(o.value(), p);
  }
  std::sort(related.begin(), related.end());
  for (const auto& [f, p] : related) {
    if (!in_window(temporal_of(st, f, vocab::has_temporal_scope()), window)) continue;
    json d = describe(st, f);
    d["relation"] = std::string(predicate_name(p));
    features.push_back(std::move(d));
    if (foi_set.insert(f).second) fois.push_back(f);
  }
  out["features"] = std::move(features);

  // Observations grouped by property.
  std::map<std::string, json> groups;
  for (const auto& foi : fois) {
    for (const auto& obs : subjects(st, vocab::fof(), Term::iri(foi))) {
      auto time = temporal_of(st, obs, vocab::phenomenon_time());
      if (!in_window(time, window)) continue;
      const std::string prop = object_value(st, obs, vocab::observed_property());
      json o{{"observation", obs}, {"foi", foi}, {"time", temporal_json(time)}};
      if (auto simple = object(st, obs, vocab::has_simple_result())) {
        o["result"] = simple->value();
        o["datatype"] = simple->datatype();
        o["unit"] = nullptr;
      } else if (auto r = object(st, obs, vocab::has_result())) {
        const auto v = object(st, r->value(), vocab::numeric_value());
        o["result"] = v ? v->value() : "";
        o["datatype"] = v ? v->datatype() : "";
        o["unit"] = object_value(st, r->value(), vocab::unit());
      } else {
        continue;
      }
      json& g = groups[prop];
      if (g.is_null()) {
        g = {{"property", prop}, {"label", object_value(st, prop, vocab::rdfs_label())}, {"observations", json::array()}};
      }
      g["observations"].push_back(std::move(o));
    }
  }
  json observations = json::array();
  json provenance = json::array();
  for (auto& [prop, g] : groups) {
    auto& list = g["observations"];
    std::sort(list.begin(), list.end(), [](const json& a, const json& b) {
      return std::tie(a["foi"].get_ref<const std::string&>(), a["observation"].get_ref<const std::string&>()) <
             std::tie(b["foi"].get_ref<const std::string&>(), b["observation"].get_ref<const std::string&>());
    });
    // property -> dataset -> organization
    const std::string dataset = object_value(st, prop, vocab::from_dataset());
    const std::string org = dataset.empty() ? "" : object_value(st, dataset, vocab::source_organization());
    provenance.push_back({{"property", prop},
                          {"dataset", dataset},
                          {"dataset_title", dataset.empty() ? "" : object_value(st, dataset, vocab::rdfs_label())},
                          {"organization", org},
                          {"organization_label", org.empty() ? "" : object_value(st, org, vocab::rdfs_label())}});
    observations.push_back(std::move(g));
  }
  out["observations"] = std::move(observations);
  out["provenance"] = std::move(provenance);
  out["experts"] = json::array();
  return out;
}

json build_comparison(const TripleStore& st, const Target& a, const Target& b) {
  json out;
  out["a"] = build_briefing(st, a, std::nullopt);
  out["b"] = build_briefing(st, b, std::nullopt);
  auto results = [](const json& group, const std::string& target) {
    // Only observations on the target itself enter the paired table.
    json rs = json::array();
    for (const auto& o : group["observations"]) {
      if (o["foi"] == target) rs.push_back({{"result", o["result"]}, {"unit", o["unit"]}, {"time", o["time"]}});
    }
    return rs;
  };
  json table = json::array();
  for (const auto& ga : out["a"]["observations"]) {
    for (const auto& gb : out["b"]["observations"]) {
      if (ga["property"] != gb["property"]) continue;
      json ra = results(ga, a.iri), rb = results(gb, b.iri);
      if (ra.empty() || rb.empty()) continue;
      table.push_back({{"property", ga["property"]}, {"label", ga["label"]}, {"a", ra}, {"b", rb}});
    }
  }
  out["table"] = std::move(table);
  return out;
}

// ------------------------------------------------------------ cells and datasets

json cells_geojson(const BoundingBox& box, int level, std::size_t max_cells) {
  if (level < 0 || level > dgg::kMaxLevel) throw RequestError(400, "level must be in 0..30");
  if (!(box.west < box.east && box.south < box.north && box.west >= -180 && box.east <= 180 && box.south >= -90 &&
        box.north <= 90)) {
    throw RequestError(400, "bbox must be west,south,east,north with west < east and south < north");
  }
  // Cheap upper estimate before covering, so huge requests fail fast.
  const double r2 = dgg::kEarthRadiusKm * dgg::kEarthRadiusKm;
  const double area = (box.east - box.west) * kDegToRad * (std::sin(box.north * kDegToRad) - std::sin(box.south * kDegToRad)) * r2;
  const double mean_cell = 4 * kPi * r2 / (6.0 * std::pow(4.0, level));
  if (area / mean_cell > 4.0 * static_cast<double>(max_cells)) {
    throw RequestError(400, "too many cells for this bbox; use a coarser level");
  }
  std::vector<dgg::CellId> cover;
  try {
    cover = dgg::cover_geometry(Geometry::rectangle(box.west, box.south, box.east, box.north), level);
  } catch (const Error& e) {
    throw RequestError(400, e.what());
  }
  if (cover.size() > max_cells) throw RequestError(400, "too many cells for this bbox; use a coarser level");
  json features = json::array();
  for (const auto& c : cover) {
    const std::string tok = dgg::token(c);
    features.push_back({{"type", "Feature"},
                        {"geometry", geojson::from_geometry(dgg::cell_geometry(c))},
                        {"properties", {{"token", tok}, {"level", c.level()}, {"iri", mint_iri(MintKind::Cell, tok)}}}});
  }
  return {{"type", "FeatureCollection"}, {"features", std::move(features)}};
}

json dataset_listing(const TripleStore& st) {
  json out = json::array();
  const std::string kont = std::string(rdf::ns::kwg_ont);
  for (const auto& d : subjects(st, vocab::rdf_type(), Term::iri(kont + "DatasetSubgraph"))) {
    const std::string org = object_value(st, d, vocab::source_organization());
    json props = json::array();
    for (const auto& p : subjects(st, vocab::from_dataset(), Term::iri(d))) {
      props.push_back({{"iri", p}, {"label", object_value(st, p, vocab::rdfs_label())}});
    }
    json themes = json::array();
    for (const auto& t : subjects(st, kont + "hasDatasetSubgraph", Term::iri(d))) {
      themes.push_back(object_value(st, t, kont + "theme"));
    }
    out.push_back({{"iri", d},
                   {"id", object_value(st, d, kont + "datasetId")},
                   {"title", object_value(st, d, vocab::rdfs_label())},
                   {"organization", {{"iri", org}, {"label", object_value(st, org, vocab::rdfs_label())}}},
                   {"license", object_value(st, d, kont + "license")},
                   {"creator", object_value(st, d, kont + "creator")},
                   {"retrieval_date", object_value(st, d, kont + "retrievalDate")},
                   {"properties", std::move(props)},
                   {"themes", std::move(themes)}});
  }
  return {{"datasets", std::move(out)}};
}

// ------------------------------------------------------------ documented queries

std::string features_query(const std::string& target, SpatialPredicate p) {
  return "SELECT ?feature WHERE { <" + target + "> kwg-ont:" + std::string(predicate_name(p)) + " ?feature . }";
}

std::string simple_observations_query(const std::string& foi) {
  return "SELECT ?obs ?property ?result WHERE {\n  ?obs sosa:hasFeatureOfInterest <" + foi +
         "> ;\n    sosa:observedProperty ?property ;\n    sosa:hasSimpleResult ?result .\n}";
}

std::string quantity_observations_query(const std::string& foi) {
  return "SELECT ?obs ?property ?result ?unit WHERE {\n  ?obs sosa:hasFeatureOfInterest <" + foi +
         "> ;\n    sosa:observedProperty ?property ;\n    sosa:hasResult ?r .\n  ?r qudt-unit:numericValue ?result ;\n"
         "    qudt-unit:unit ?unit .\n}";
}

std::string provenance_query(const std::string& property) {
  return "SELECT ?dataset ?organization WHERE {\n  <" + property +
         "> kwg-ont:fromDataset ?dataset .\n  ?dataset kwg-ont:sourceOrganization ?organization .\n}";
}

// ------------------------------------------------------------ handlers

Service::Service(std::shared_ptr<const TripleStore> store, ServiceConfig cfg)
    : cfg_(std::move(cfg)), store_(std::move(store)) {}

std::shared_ptr<const TripleStore> Service::snapshot() const {
  std::lock_guard lock(mutex_);
  return store_;
}

void Service::swap(std::shared_ptr<const TripleStore> store) {
  std::lock_guard lock(mutex_);
  store_ = std::move(store);
}

Response Service::query(std::string_view text) const {
  const auto st = snapshot();
  try {
    return {200, query::to_json(query::run(text, *st)), "application/json"};
  } catch (const ParseError& e) {
    return error_response(400, e.what(), {{"line", e.line()}, {"column", e.column()}});
  } catch (const query::UnsupportedFeature& e) {
    return error_response(422, e.what(), {{"token", e.token()}});
  } catch (const Error& e) {
    return error_response(400, e.what());
  }
}

Response Service::briefing(const Params& params) const {
  const auto st = snapshot();
  try {
    const Target t = resolve_target(*st, param(params, "cell"), param(params, "region"));
    const auto window = parse_window(param(params, "from"), param(params, "to"));
    return json_response(200, build_briefing(*st, t, window));
  } catch (const RequestError& e) {
    return error_response(e.status(), e.what());
  } catch (const Error& e) {
    return error_response(400, e.what());
  }
}

Response Service::compare(const Params& params) const {
  const auto st = snapshot();
  try {
    const auto a = param(params, "a"), b = param(params, "b");
    if (!a || !b || a->empty() || b->empty()) throw RequestError(400, "compare needs 'a' and 'b'");
    return json_response(200, build_comparison(*st, resolve_any(*st, *a), resolve_any(*st, *b)));
  } catch (const RequestError& e) {
    return error_response(e.status(), e.what());
  } catch (const Error& e) {
    return error_response(400, e.what());
  }
}

Response Service::cells(const Params& params) const {
  try {
    const auto bbox = param(params, "bbox"), level = param(params, "level");
    if (!bbox || !level) throw RequestError(400, "cells needs 'bbox' and 'level'");
    double v[4];
    std::size_t start = 0;
    for (int k = 0; k < 4; ++k) {
      const std::size_t comma = bbox->find(',', start);
      if ((k < 3) == (comma == std::string::npos)) throw RequestError(400, "bbox must be west,south,east,north");
      const std::string part = bbox->substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      std::size_t used = 0;
      try {
        v[k] = std::stod(part, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != part.size() || !std::isfinite(v[k])) throw RequestError(400, "bbox must hold four numbers");
      start = comma + 1;
    }
    int lvl = 0;
    try {
      std::size_t used = 0;
      lvl = std::stoi(*level, &used);
      if (used != level->size()) throw RequestError(400, "level must be an integer");
    } catch (const std::logic_error&) {
      throw RequestError(400, "level must be an integer");
    }
    return {200, cells_geojson({v[0], v[1], v[2], v[3]}, lvl, cfg_.max_cells).dump(), "application/geo+json"};
  } catch (const RequestError& e) {
    return error_response(e.status(), e.what());
  }
}

Response Service::datasets() const { return json_response(200, dataset_listing(*snapshot())); }

Response Service::health() const {
  return json_response(200, {{"status", "ok"}, {"triples", snapshot()->size()}});
}

}  // namespace kwg::service
