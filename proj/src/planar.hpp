#pragma once

// Internal planar primitives shared by validation and relate.

#include <algorithm>
#include <cmath>
#include <optional>

#include "kwg/geometry.hpp"

namespace kwg::planar {

inline double cross(LatLng o, LatLng a, LatLng b) {
  return (a.lng - o.lng) * (b.lat - o.lat) - (a.lat - o.lat) * (b.lng - o.lng);
}

inline double dist2(LatLng a, LatLng b) {
  const double dx = a.lng - b.lng, dy = a.lat - b.lat;
  return dx * dx + dy * dy;
}

inline bool near(LatLng a, LatLng b) { return dist2(a, b) <= kTopologyEpsilon * kTopologyEpsilon; }

/// Parameter of the projection of p onto segment ab, clamped to [0, 1].
inline double project(LatLng p, LatLng a, LatLng b) {
  const double dx = b.lng - a.lng, dy = b.lat - a.lat;
  const double len2 = dx * dx + dy * dy;
  if (len2 == 0.0) return 0.0;
  const double t = ((p.lng - a.lng) * dx + (p.lat - a.lat) * dy) / len2;
  return std::clamp(t, 0.0, 1.0);
}

inline LatLng lerp(LatLng a, LatLng b, double t) {
  return {a.lat + (b.lat - a.lat) * t, a.lng + (b.lng - a.lng) * t};
}

inline bool on_segment(LatLng p, LatLng a, LatLng b) {
  return near(p, lerp(a, b, project(p, a, b)));
}

/// Proper crossing point of two segments, excluding endpoint contacts.
inline std::optional<LatLng> proper_crossing(LatLng a, LatLng b, LatLng c, LatLng d) {
  const double d1 = cross(c, d, a), d2 = cross(c, d, b);
  const double d3 = cross(a, b, c), d4 = cross(a, b, d);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    const double t = d1 / (d1 - d2);
    return lerp(a, b, t);
  }
  return std::nullopt;
}

inline bool segments_touch(LatLng a, LatLng b, LatLng c, LatLng d) {
  return on_segment(a, c, d) || on_segment(b, c, d) || on_segment(c, a, b) ||
         on_segment(d, a, b) || proper_crossing(a, b, c, d).has_value();
}

}  // namespace kwg::planar
