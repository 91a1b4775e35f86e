#include "kwg/geojson.hpp"

#include "kwg/error.hpp"

namespace kwg::geojson {

namespace {

[[noreturn]] void fail(const std::string& message) { throw ParseError("GeoJSON: " + message, 0, 0); }

LatLng position(const nlohmann::json& p) {
  if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
    fail("a position must be [lng, lat]");
  }
  return {p[1].get<double>(), p[0].get<double>()};
}

std::vector<LatLng> positions(const nlohmann::json& a) {
  if (!a.is_array()) fail("expected an array of positions");
  std::vector<LatLng> out;
  for (const auto& p : a) out.push_back(position(p));
  return out;
}

Polygon polygon(const nlohmann::json& rings) {
  if (!rings.is_array() || rings.empty()) fail("a polygon needs at least one ring");
  Polygon p;
  p.outer = positions(rings[0]);
  for (std::size_t i = 1; i < rings.size(); ++i) p.holes.push_back(positions(rings[i]));
  return p;
}

nlohmann::json position_json(const LatLng& p) { return nlohmann::json::array({p.lng, p.lat}); }

nlohmann::json positions_json(const std::vector<LatLng>& ps) {
  auto out = nlohmann::json::array();
  for (const auto& p : ps) out.push_back(position_json(p));
  return out;
}

nlohmann::json polygon_json(const Polygon& p) {
  auto out = nlohmann::json::array({positions_json(p.outer)});
  for (const auto& h : p.holes) out.push_back(positions_json(h));
  return out;
}

}  // namespace

Geometry to_geometry(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) fail("geometry object without type");
  const std::string type = j["type"];
  if (!j.contains("coordinates")) fail(type + " without coordinates");
  const auto& c = j["coordinates"];
  try {
    if (type == "Point") return Geometry::point(position(c));
    if (type == "MultiPoint") return Geometry::multi_point(positions(c));
    if (type == "LineString") return Geometry::line_string(positions(c));
    if (type == "MultiLineString") {
      std::vector<LineString> lines;
      if (!c.is_array()) fail("bad MultiLineString");
      for (const auto& l : c) lines.push_back(positions(l));
      return Geometry::multi_line_string(std::move(lines));
    }
    if (type == "Polygon") return Geometry::polygon(polygon(c));
    if (type == "MultiPolygon") {
      std::vector<Polygon> polys;
      if (!c.is_array()) fail("bad MultiPolygon");
      for (const auto& p : c) polys.push_back(polygon(p));
      return Geometry::multi_polygon(std::move(polys));
    }
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    fail(std::string("invalid geometry: ") + e.what());
  }
  fail("unsupported geometry type '" + type + "'");
}

nlohmann::json from_geometry(const Geometry& g) {
  nlohmann::json j;
  switch (g.type()) {
    case GeometryType::Point:
      j["type"] = "Point";
      j["coordinates"] = position_json(g.points().front());
      break;
    case GeometryType::MultiPoint:
      j["type"] = "MultiPoint";
      j["coordinates"] = positions_json(g.points());
      break;
    case GeometryType::LineString:
      j["type"] = "LineString";
      j["coordinates"] = positions_json(g.lines().front());
      break;
    case GeometryType::MultiLineString: {
      j["type"] = "MultiLineString";
      auto a = nlohmann::json::array();
      for (const auto& l : g.lines()) a.push_back(positions_json(l));
      j["coordinates"] = a;
      break;
    }
    case GeometryType::Polygon:
      j["type"] = "Polygon";
      j["coordinates"] = polygon_json(g.polygons().front());
      break;
    case GeometryType::MultiPolygon: {
      j["type"] = "MultiPolygon";
      auto a = nlohmann::json::array();
      for (const auto& p : g.polygons()) a.push_back(polygon_json(p));
      j["coordinates"] = a;
      break;
    }
  }
  return j;
}

}  // namespace kwg::geojson
