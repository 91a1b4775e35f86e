#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "kwg/error.hpp"
#include "kwg/ingest.hpp"

namespace kwg::ingest {

LatLng RasterLayer::pixel_center(int row, int col) const {
  const double dy = (north - south) / rows, dx = (east - west) / cols;
  return {north - (row + 0.5) * dy, west + (col + 0.5) * dx};
}

RasterLayer parse_ascii_raster(std::string_view text) {
  std::istringstream in{std::string(text)};
  RasterLayer r;
  std::map<std::string, std::string> header;
  std::string word;
  std::streampos values_start = 0;
  while (true) {
    values_start = in.tellg();
    if (!(in >> word)) break;
    const bool is_key = std::isalpha(static_cast<unsigned char>(word[0])) && word != "nan" && word != "NaN";
    if (!is_key) break;
    std::string value;
    if (!(in >> value)) throw ParseError("raster: header '" + word + "' without value", 0, 0);
    for (auto& c : word) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    header[word] = value;
  }
  auto number = [&](const char* key, bool required) -> std::optional<double> {
    auto it = header.find(key);
    if (it == header.end()) {
      if (required) throw ParseError(std::string("raster: missing header '") + key + "'", 0, 0);
      return std::nullopt;
    }
    double v = 0;
    auto [ptr, ec] = std::from_chars(it->second.data(), it->second.data() + it->second.size(), v);
    if (ec != std::errc() || ptr != it->second.data() + it->second.size()) {
      throw ParseError(std::string("raster: header '") + key + "' is not a number", 0, 0);
    }
    return v;
  };
  const double cols = *number("ncols", true), rows = *number("nrows", true);
  if (cols < 1 || rows < 1 || cols != std::floor(cols) || rows != std::floor(rows)) {
    throw ParseError("raster: ncols and nrows must be positive integers", 0, 0);
  }
  r.cols = static_cast<int>(cols);
  r.rows = static_cast<int>(rows);
  r.west = *number("west", true);
  r.south = *number("south", true);
  r.east = *number("east", true);
  r.north = *number("north", true);
  r.nodata = number("nodata", false);
  if (auto it = header.find("kind"); it != header.end()) {
    if (it->second == "continuous") {
      r.kind = RasterKind::Continuous;
    } else if (it->second == "categorical") {
      r.kind = RasterKind::Categorical;
    } else {
      throw ParseError("raster: kind must be continuous or categorical", 0, 0);
    }
  }
  if (!(r.west < r.east && r.south < r.north && r.west >= -180 && r.east <= 180 && r.south >= -90 && r.north <= 90)) {
    throw ParseError("raster: bounding box is not well ordered", 0, 0);
  }
  in.clear();
  in.seekg(values_start);
  std::string tok;
  while (in >> tok) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
      throw ParseError("raster: bad value '" + tok + "'", 0, static_cast<int>(r.values.size()) + 1);
    }
    r.values.push_back(v);
  }
  if (r.values.size() != static_cast<std::size_t>(r.rows) * r.cols) {
    throw ParseError("raster: expected " + std::to_string(static_cast<std::size_t>(r.rows) * r.cols) + " values, found " +
                         std::to_string(r.values.size()),
                     0, 0);
  }
  return r;
}

RasterMapping parse_raster_mapping(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::Data, "raster mapping must be a JSON object");
  auto get = [&](const char* key, bool required) -> std::string {
    if (!j.contains(key) || j[key].is_null()) {
      if (required) throw Error(ErrorKind::Data, std::string("missing field '") + key + "'");
      return {};
    }
    if (!j[key].is_string()) throw Error(ErrorKind::Data, std::string("field '") + key + "' must be a string");
    return j[key].get<std::string>();
  };
  auto iri = [&](const char* key, bool required) {
    const std::string v = get(key, required);
    if (v.empty()) return v;
    try {
      return rdf::expand(v);
    } catch (const Error& e) {
      throw Error(ErrorKind::Data, std::string("field '") + key + "': " + e.what());
    }
  };
  RasterMapping m;
  m.dataset_id = get("dataset_id", true);
  m.property = iri("property", true);
  m.label = get("label", false);
  m.observation_class = iri("observation_class", false);
  if (m.observation_class.empty()) m.observation_class = rdf::iri(rdf::ns::sosa, "Observation");
  m.unit = iri("unit", false);
  if (j.contains("level") && !j["level"].is_null()) {
    if (!j["level"].is_number_integer()) throw Error(ErrorKind::Data, "field 'level' must be an integer");
    m.level = j["level"].get<int>();
  }
  if (j.contains("time") && !j["time"].is_null()) {
    const auto& t = j["time"];
    TimeMapping tm;
    tm.target = TimeTarget::Observation;
    tm.instant = t.value("instant", "");
    tm.begin = t.value("begin", "");
    tm.end = t.value("end", "");
    if (tm.instant.empty() == tm.begin.empty() || tm.begin.empty() != tm.end.empty()) {
      throw Error(ErrorKind::Data, "raster time needs an instant or a begin/end pair");
    }
    try {
      if (!tm.instant.empty()) make_instant(tm.instant);
      if (!tm.begin.empty()) make_interval(tm.begin, tm.end);
    } catch (const Error& e) {
      throw Error(ErrorKind::Data, std::string("time: ") + e.what());
    }
    m.time = tm;
  }
  return m;
}

std::vector<CellSummary> summarize_raster(const RasterLayer& r, int level) {
  if (r.values.empty() || r.rows < 1 || r.cols < 1) throw Error(ErrorKind::InvalidArgument, "empty raster");
  const LatLng center{(r.south + r.north) / 2, (r.west + r.east) / 2};
  const double dy = (r.north - r.south) / r.rows * kDegToRad, dx = (r.east - r.west) / r.cols * kDegToRad;
  const double pixel_km2 = dx * dy * std::cos(center.lat * kDegToRad) * dgg::kEarthRadiusKm * dgg::kEarthRadiusKm;
  const double cell_km2 = dgg::cell_area_km2(dgg::cell_from_point(center, level));
  if (cell_km2 < pixel_km2) {
    throw Error(ErrorKind::InvalidArgument, "level " + std::to_string(level) + " cells (" + std::to_string(cell_km2) +
                                                " km2) are smaller than raster pixels (" + std::to_string(pixel_km2) +
                                                " km2); use a coarser level or a finer raster");
  }

  struct Acc {
    double sum = 0;
    std::size_t n = 0;
    std::map<long long, std::size_t> counts;
  };
  std::map<dgg::CellId, Acc> acc;
  for (int row = 0; row < r.rows; ++row) {
    for (int col = 0; col < r.cols; ++col) {
      const double v = r.at(row, col);
      if (std::isnan(v) || (r.nodata && v == *r.nodata)) continue;
      Acc& a = acc[dgg::cell_from_point(r.pixel_center(row, col), level)];
      ++a.n;
      if (r.kind == RasterKind::Continuous) {
        a.sum += v;
      } else {
        if (v != std::floor(v)) {
          throw Error(ErrorKind::InvalidArgument, "categorical raster holds non-integer code " + std::to_string(v));
        }
        ++a.counts[static_cast<long long>(v)];
      }
    }
  }
  std::vector<CellSummary> out;
  for (const auto& [cell, a] : acc) {
    CellSummary s{cell, 0, a.n};
    if (r.kind == RasterKind::Continuous) {
      s.value = a.sum / static_cast<double>(a.n);
    } else {
      std::size_t best = 0;
      for (const auto& [code, n] : a.counts) {
        if (n > best) {  // ascending code order keeps the smallest on ties
          best = n;
          s.value = static_cast<double>(code);
        }
      }
    }
    out.push_back(s);
  }
  return out;
}

Entities raster_entities(const RasterLayer& r, int level, const RasterMapping& m, const DatasetManifest& manifest) {
  if (manifest.dataset_id != m.dataset_id) {
    throw Error(ErrorKind::Data, "manifest dataset '" + manifest.dataset_id + "' does not match raster mapping '" +
                                     m.dataset_id + "'");
  }
  Entities out;
  out.dataset = make_dataset(manifest);
  out.properties.push_back({m.property, m.label.empty() ? std::string(rdf::local_name(m.property)) : m.label,
                            out.dataset.iri});
  out.observation_classes.push_back(m.observation_class);
  std::optional<TemporalEntity> time;
  if (m.time) {
    if (!m.time->instant.empty()) {
      time = make_instant(m.time->instant);
    } else {
      time = make_interval(m.time->begin, m.time->end);
    }
  }
  ObservationCollection coll{mint_iri(MintKind::Collection, m.dataset_id + "." + std::string(rdf::local_name(m.property))),
                             m.property,
                             {}};
  for (const auto& s : summarize_raster(r, level)) {
    Feature cell = make_cell_feature(s.cell);
    Observation o;
    o.key = observation_key(m.dataset_id, cell.key, m.property);
    o.iri = mint_iri(MintKind::Observation, o.key);
    o.feature_of_interest = cell.iri;
    o.observed_property = m.property;
    o.class_iri = m.observation_class;
    o.phenomenon_time = time;
    if (!m.unit.empty()) {
      o.result = QuantityValue{s.value, m.unit};
    } else if (r.kind == RasterKind::Categorical) {
      o.result = SimpleResult{std::to_string(static_cast<long long>(s.value)), rdf::iri(rdf::ns::xsd, "integer")};
    } else {
      char buf[64];
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), s.value);
      o.result = SimpleResult{std::string(buf, ptr), rdf::iri(rdf::ns::xsd, "double")};
    }
    coll.members.insert(o.iri);
    out.observations.push_back(std::move(o));
    out.features.push_back(std::move(cell));
  }
  if (!coll.members.empty()) out.collections.push_back(std::move(coll));
  return out;
}

}  // namespace kwg::ingest
