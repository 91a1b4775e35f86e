#pragma once

#include <cmath>

namespace kwg {

/// Geographic coordinate in degrees. Longitude is kept in (-180, 180].
struct LatLng {
  double lat = 0.0;
  double lng = 0.0;

  friend bool operator==(const LatLng&, const LatLng&) = default;
};

/// Throws ErrorKind::InvalidArgument when lat/lng fall outside their ranges.
/// Returns the point with lng = -180 folded onto +180.
LatLng normalized(LatLng p);

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDegToRad = kPi / 180.0;
inline constexpr double kRadToDeg = 180.0 / kPi;

}  // namespace kwg
