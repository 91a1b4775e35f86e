#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "kwg/error.hpp"
#include "kwg/geojson.hpp"
#include "kwg/ingest.hpp"

namespace kwg::ingest {

using nlohmann::json;

// ------------------------------------------------------------ sources

std::size_t Table::column(const std::string& name) const {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw Error(ErrorKind::Data, "missing column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

Table parse_csv(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false, field_started = false;
  int line = 1, record_line = 1;
  std::size_t i = 0;
  auto end_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    const bool blank = record.size() == 1 && record[0].empty();
    if (!blank) records.push_back(std::move(record));
    record.clear();
    field_started = false;
  };
  while (i < text.size()) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          i += 2;
          continue;
        }
        quoted = false;
        ++i;
        if (i < text.size() && text[i] != ',' && text[i] != '\n' && text[i] != '\r') {
          throw ParseError("CSV: text after closing quote", line, 0);
        }
        continue;
      }
      if (c == '\n') ++line;
      field += c;
      ++i;
      continue;
    }
    if (c == '"' && !field_started && field.empty()) {
      quoted = true;
      field_started = true;
      ++i;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
      field_started = false;
      ++i;
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      ++i;
      end_record();
      record_line = ++line;
    } else {
      field += c;
      field_started = true;
      ++i;
    }
  }
  if (quoted) throw ParseError("CSV: unterminated quoted field", record_line, 0);
  if (!field.empty() || !record.empty()) end_record();
  if (records.empty()) throw ParseError("CSV: missing header row", 1, 1);

  Table t;
  t.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != t.header.size()) {
      throw ParseError("CSV: record " + std::to_string(r) + " has " + std::to_string(records[r].size()) +
                           " fields, header has " + std::to_string(t.header.size()),
                       static_cast<int>(r) + 1, 0);
    }
    t.rows.push_back(std::move(records[r]));
  }
  return t;
}

Table parse_geojson_features(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("GeoJSON: ") + e.what(), 0, static_cast<int>(e.byte));
  }
  if (!j.is_object() || j.value("type", "") != "FeatureCollection" || !j.contains("features") ||
      !j["features"].is_array()) {
    throw ParseError("GeoJSON: expected a FeatureCollection", 0, 0);
  }
  std::set<std::string> keys;
  for (const auto& f : j["features"]) {
    if (f.contains("properties") && f["properties"].is_object()) {
      for (const auto& [k, v] : f["properties"].items()) keys.insert(k);
    }
  }
  Table t;
  t.header.assign(keys.begin(), keys.end());
  for (const auto& f : j["features"]) {
    std::vector<std::string> row;
    for (const auto& k : t.header) {
      const json* v = nullptr;
      if (f.contains("properties") && f["properties"].is_object() && f["properties"].contains(k)) {
        v = &f["properties"][k];
      }
      if (!v || v->is_null()) {
        row.emplace_back();
      } else if (v->is_string()) {
        row.push_back(v->get<std::string>());
      } else {
        row.push_back(v->dump());
      }
    }
    t.rows.push_back(std::move(row));
    if (f.contains("geometry") && !f["geometry"].is_null()) {
      t.geometries.push_back(geojson::to_geometry(f["geometry"]));
    } else {
      t.geometries.emplace_back();
    }
  }
  return t;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::NotFound, "cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json read_json(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Data, path.string() + ": " + e.what());
  }
}

Table read_table(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  const std::string ext = path.extension().string();
  try {
    if (ext == ".geojson" || ext == ".json") return parse_geojson_features(text);
    return parse_csv(text);
  } catch (const ParseError& e) {
    throw Error(ErrorKind::Data, path.string() + ": " + e.what());
  }
}

// ------------------------------------------------------------ configuration

namespace {

std::string str(const json& j, const char* key, bool required = true) {
  if (!j.contains(key) || j[key].is_null()) {
    if (required) throw Error(ErrorKind::Data, std::string("missing field '") + key + "'");
    return {};
  }
  if (!j[key].is_string()) throw Error(ErrorKind::Data, std::string("field '") + key + "' must be a string");
  return j[key].get<std::string>();
}

std::string iri_field(const json& j, const char* key, bool required = true) {
  const std::string v = str(j, key, required);
  if (v.empty()) return v;
  try {
    return rdf::expand(v);
  } catch (const Error& e) {
    throw Error(ErrorKind::Data, std::string("field '") + key + "': " + e.what());
  }
}

std::optional<int> level_field(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  if (!j[key].is_number_integer()) throw Error(ErrorKind::Data, std::string("field '") + key + "' must be an integer");
  const int v = j[key].get<int>();
  if (v < 0 || v > dgg::kMaxLevel) throw Error(ErrorKind::Data, std::string("field '") + key + "' out of range");
  return v;
}

TimeMapping parse_time(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::Data, "'time' must be an object");
  TimeMapping t;
  const std::string target = str(j, "target", false);
  if (target.empty() || target == "feature") {
    t.target = TimeTarget::Feature;
  } else if (target == "observation") {
    t.target = TimeTarget::Observation;
  } else {
    throw Error(ErrorKind::Data, "time target must be 'feature' or 'observation'");
  }
  t.instant_column = str(j, "instant_column", false);
  t.begin_column = str(j, "begin_column", false);
  t.end_column = str(j, "end_column", false);
  t.instant = str(j, "instant", false);
  t.begin = str(j, "begin", false);
  t.end = str(j, "end", false);
  const int forms = !t.instant_column.empty() + !t.begin_column.empty() + !t.instant.empty() + !t.begin.empty();
  if (forms != 1) throw Error(ErrorKind::Data, "time needs exactly one of instant(_column) or begin(_column)");
  if (t.begin_column.empty() != t.end_column.empty() || t.begin.empty() != t.end.empty()) {
    throw Error(ErrorKind::Data, "interval time needs both begin and end");
  }
  try {
    if (!t.instant.empty()) make_instant(t.instant);
    if (!t.begin.empty()) make_interval(t.begin, t.end);
  } catch (const Error& e) {
    throw Error(ErrorKind::Data, std::string("time: ") + e.what());
  }
  return t;
}

std::optional<TemporalEntity> time_for_row(const TimeMapping& t, const Table& table, std::size_t row) {
  if (!t.instant.empty()) return make_instant(t.instant);
  if (!t.begin.empty()) return make_interval(t.begin, t.end);
  const auto& cells = table.rows[row];
  if (!t.instant_column.empty()) {
    const std::string& v = cells[table.column(t.instant_column)];
    if (v.empty()) return std::nullopt;
    return make_instant(v);
  }
  const std::string& b = cells[table.column(t.begin_column)];
  const std::string& e = cells[table.column(t.end_column)];
  if (b.empty() && e.empty()) return std::nullopt;
  return make_interval(b, e);
}

FeatureKind parse_kind(const std::string& s) {
  if (s == "Hazard") return FeatureKind::Hazard;
  if (s == "Region") return FeatureKind::Region;
  throw Error(ErrorKind::Data, "feature kind must be 'Hazard' or 'Region', got '" + s + "'");
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

bool TimeMapping::present() const {
  return !instant_column.empty() || !begin_column.empty() || !instant.empty() || !begin.empty();
}

MappingConfig parse_mapping(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::Data, "mapping must be a JSON object");
  MappingConfig c;
  c.dataset_id = str(j, "dataset_id");
  if (c.dataset_id.empty()) throw Error(ErrorKind::Data, "empty dataset_id");
  if (!j.contains("feature") || !j["feature"].is_object()) throw Error(ErrorKind::Data, "missing 'feature' object");
  const json& f = j["feature"];
  c.foi_kind = parse_kind(str(f, "kind"));
  c.foi_class = iri_field(f, "class", false);
  if (c.foi_class.empty()) c.foi_class = kind_class(c.foi_kind);
  c.foi_key_column = str(f, "key_column");
  c.label_column = str(f, "label_column", false);
  if (f.contains("geometry") && !f["geometry"].is_null()) {
    const json& g = f["geometry"];
    const std::string format = str(g, "format");
    if (format == "wkt") {
      c.geometry_format = GeometryFormat::Wkt;
    } else if (format == "geojson") {
      c.geometry_format = GeometryFormat::GeoJson;
    } else if (format == "source") {
      c.geometry_format = GeometryFormat::Source;
    } else {
      throw Error(ErrorKind::Data, "geometry format must be wkt, geojson or source");
    }
    if (c.geometry_format != GeometryFormat::Source) c.geometry_column = str(g, "column");
  }
  if (j.contains("time") && !j["time"].is_null()) c.time = parse_time(j["time"]);
  if (!j.contains("properties") || !j["properties"].is_array()) throw Error(ErrorKind::Data, "missing 'properties' array");
  std::set<std::string> seen;
  for (const auto& p : j["properties"]) {
    PropertyMapping m;
    m.column = str(p, "column");
    m.property = iri_field(p, "property");
    m.label = str(p, "label", false);
    m.observation_class = iri_field(p, "observation_class", false);
    if (m.observation_class.empty()) m.observation_class = rdf::iri(rdf::ns::sosa, "Observation");
    const std::string mode = str(p, "result", false);
    if (mode.empty() || mode == "simple") {
      m.mode = ResultMode::Simple;
      m.datatype = iri_field(p, "datatype", false);
      if (m.datatype.empty()) m.datatype = rdf::iri(rdf::ns::xsd, "string");
    } else if (mode == "quantity") {
      m.mode = ResultMode::Quantity;
      m.unit = iri_field(p, "unit");
    } else {
      throw Error(ErrorKind::Data, "result must be 'simple' or 'quantity'");
    }
    if (!seen.insert(m.property).second) {
      throw Error(ErrorKind::Data, "property <" + m.property + "> mapped twice");
    }
    c.properties.push_back(std::move(m));
  }
  c.integration_level = level_field(j, "integration_level");
  return c;
}

DatasetManifest parse_manifest(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::Data, "manifest must be a JSON object");
  DatasetManifest m;
  m.dataset_id = str(j, "dataset_id");
  m.title = str(j, "title");
  m.organization = str(j, "organization");
  m.license = str(j, "license", false);
  m.creator = str(j, "creator", false);
  m.retrieval_date = str(j, "retrieval_date", false);
  if (m.dataset_id.empty() || m.title.empty()) throw Error(ErrorKind::Data, "manifest needs a dataset_id and title");
  if (m.organization.empty()) throw Error(ErrorKind::Data, "manifest needs an organization");
  return m;
}

// ------------------------------------------------------------ entities

EntityIndex Entities::known() const {
  EntityIndex k;
  for (const auto& f : features) k.insert(f.iri);
  for (const auto& p : properties) k.insert(p.iri);
  return k;
}

DatasetSubgraph make_dataset(const DatasetManifest& m) {
  DatasetSubgraph d;
  d.iri = mint_iri(MintKind::Dataset, m.dataset_id);
  d.dataset_id = m.dataset_id;
  d.title = m.title;
  d.organization = m.organization;
  d.organization_iri = mint_iri(MintKind::Organization, slug(m.organization));
  d.license = m.license;
  d.creator = m.creator;
  d.retrieval_date = m.retrieval_date;
  return d;
}

Entities ingest_table(const Table& table, const MappingConfig& cfg, const DatasetManifest& manifest) {
  if (manifest.dataset_id != cfg.dataset_id) {
    throw Error(ErrorKind::Data, "manifest dataset '" + manifest.dataset_id + "' does not match mapping dataset '" +
                                     cfg.dataset_id + "'");
  }
  // Resolve every referenced column before touching rows.
  const std::size_t key_col = table.column(cfg.foi_key_column);
  const std::optional<std::size_t> label_col =
      cfg.label_column.empty() ? std::nullopt : std::optional(table.column(cfg.label_column));
  std::optional<std::size_t> geom_col;
  if (cfg.geometry_format == GeometryFormat::Wkt || cfg.geometry_format == GeometryFormat::GeoJson) {
    geom_col = table.column(cfg.geometry_column);
  }
  if (cfg.geometry_format == GeometryFormat::Source && table.geometries.size() != table.rows.size()) {
    throw Error(ErrorKind::Data, "geometry format 'source' needs a GeoJSON source");
  }
  if (cfg.time) {
    for (const auto* c : {&cfg.time->instant_column, &cfg.time->begin_column, &cfg.time->end_column}) {
      if (!c->empty()) table.column(*c);
    }
  }
  std::vector<std::size_t> prop_cols;
  for (const auto& p : cfg.properties) prop_cols.push_back(table.column(p.column));

  Entities out;
  out.dataset = make_dataset(manifest);
  for (const auto& p : cfg.properties) {
    out.properties.push_back({p.property, p.label.empty() ? p.column : p.label, out.dataset.iri});
    if (std::find(out.observation_classes.begin(), out.observation_classes.end(), p.observation_class) ==
        out.observation_classes.end())
      out.observation_classes.push_back(p.observation_class);
  }

  std::set<std::string> keys;
  std::vector<std::set<std::string>> members(cfg.properties.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where = "row " + std::to_string(r + 1);
    const std::string key = trim(row[key_col]);
    if (key.empty()) throw Error(ErrorKind::Data, where + ": empty key in column '" + cfg.foi_key_column + "'");
    if (!keys.insert(key).second) throw Error(ErrorKind::Data, where + ": duplicate key '" + key + "'");

    Feature f;
    f.kind = cfg.foi_kind;
    f.class_iri = cfg.foi_class;
    if (cfg.foi_kind == FeatureKind::Hazard) {
      f.iri = mint_iri(MintKind::Hazard, key);
      f.key = "hazard." + key;
    } else {
      f.iri = mint_iri(MintKind::Region, key);
      f.key = key;
    }
    f.label = label_col && !trim(row[*label_col]).empty() ? trim(row[*label_col]) : key;
    try {
      if (geom_col && !trim(row[*geom_col]).empty()) {
        const std::string g = trim(row[*geom_col]);
        if (cfg.geometry_format == GeometryFormat::Wkt) {
          f.geometry = parse_wkt(g);
        } else {
          f.geometry = geojson::to_geometry(json::parse(g));
        }
      } else if (cfg.geometry_format == GeometryFormat::Source) {
        f.geometry = table.geometries[r];
      }
    } catch (const std::exception& e) {
      throw Error(ErrorKind::Data, where + ": geometry: " + e.what());
    }
    std::optional<TemporalEntity> time;
    if (cfg.time) {
      try {
        time = time_for_row(*cfg.time, table, r);
      } catch (const Error& e) {
        throw Error(ErrorKind::Data, where + ": time: " + e.what());
      }
      if (cfg.time->target == TimeTarget::Feature) f.temporal_scope = time;
    }

    for (std::size_t k = 0; k < cfg.properties.size(); ++k) {
      const auto& pm = cfg.properties[k];
      const std::string value = trim(row[prop_cols[k]]);
      if (value.empty()) continue;
      Observation o;
      o.iri = mint_iri(MintKind::Observation, observation_key(cfg.dataset_id, f.key, pm.property));
      o.key = observation_key(cfg.dataset_id, f.key, pm.property);
      o.feature_of_interest = f.iri;
      o.observed_property = pm.property;
      o.class_iri = pm.observation_class;
      const std::string at = where + ", column '" + pm.column + "'";
      if (pm.mode == ResultMode::Quantity) {
        double v = 0;
        const char* b = value.data();
        const char* e = b + value.size();
        if (*b == '+') ++b;
        auto [ptr, ec] = std::from_chars(b, e, v);
        if (ec != std::errc() || ptr != e || !std::isfinite(v)) {
          throw Error(ErrorKind::Data, at + ": unparseable numeric '" + value + "'");
        }
        o.result = QuantityValue{v, pm.unit};
      } else {
        try {
          Term::literal(value, pm.datatype);
        } catch (const Error& e) {
          throw Error(ErrorKind::Data, at + ": " + e.what());
        }
        o.result = SimpleResult{value, pm.datatype};
      }
      if (cfg.time && cfg.time->target == TimeTarget::Observation) o.phenomenon_time = time;
      members[k].insert(o.iri);
      out.observations.push_back(std::move(o));
    }
    out.features.push_back(std::move(f));
  }
  for (std::size_t k = 0; k < cfg.properties.size(); ++k) {
    if (members[k].empty()) continue;
    const std::string local(rdf::local_name(cfg.properties[k].property));
    out.collections.push_back({mint_iri(MintKind::Collection, cfg.dataset_id + "." + local),
                               cfg.properties[k].property, std::move(members[k])});
  }
  return out;
}

std::vector<Triple> emit_entities(const Entities& e) {
  std::vector<Triple> out;
  auto append = [&](std::vector<Triple> ts) { out.insert(out.end(), ts.begin(), ts.end()); };
  std::set<std::pair<std::string, FeatureKind>> classes;
  for (const auto& f : e.features) {
    append(emit_feature(f));
    classes.emplace(f.class_iri, f.kind);
  }
  for (const auto& [cls, kind] : classes) append(emit_feature_class(cls, kind));
  for (const auto& c : e.observation_classes) append(emit_observation_class(c));
  for (const auto& p : e.properties) append(emit_property(p));
  append(emit_dataset(e.dataset));
  for (const auto& c : e.collections) append(emit_collection(c));
  const EntityIndex known = e.known();
  for (const auto& o : e.observations) {
    append(emit_observation(o, known));
    out.push_back(emit_foi_link(o));
  }
  return out;
}

}  // namespace kwg::ingest
