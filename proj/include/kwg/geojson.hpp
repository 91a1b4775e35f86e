#pragma once

#include <nlohmann/json.hpp>

#include "kwg/geometry.hpp"

namespace kwg::geojson {

/// GeoJSON geometry object -> Geometry. Positions are [lng, lat]; a third
/// ordinate is rejected. Throws ParseError on malformed input.
Geometry to_geometry(const nlohmann::json& j);
nlohmann::json from_geometry(const Geometry& g);

}  // namespace kwg::geojson
