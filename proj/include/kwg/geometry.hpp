#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kwg/latlng.hpp"

namespace kwg {

// Planar geometry in (lng, lat) degrees. x is longitude, y is latitude.

using Ring = std::vector<LatLng>;
using LineString = std::vector<LatLng>;

struct Polygon {
  Ring outer;               // counterclockwise, closed
  std::vector<Ring> holes;  // clockwise, closed

  friend bool operator==(const Polygon&, const Polygon&) = default;
};

enum class GeometryType { Point, LineString, Polygon, MultiPoint, MultiLineString, MultiPolygon };

std::string_view to_string(GeometryType type);

struct BoundingBox {
  double west = 0.0;
  double south = 0.0;
  double east = 0.0;
  double north = 0.0;

  bool intersects(const BoundingBox& other, double eps = 0.0) const {
    return west <= other.east + eps && other.west <= east + eps && south <= other.north + eps &&
           other.south <= north + eps;
  }
};

/// A validated Simple Features geometry. Construction goes through the
/// factory functions, which reject degenerate input and normalise ring
/// orientation (outer counterclockwise, holes clockwise).
class Geometry {
 public:
  static Geometry point(LatLng p);
  static Geometry multi_point(std::vector<LatLng> points);
  static Geometry line_string(LineString line);
  static Geometry multi_line_string(std::vector<LineString> lines);
  static Geometry polygon(Polygon poly);
  static Geometry multi_polygon(std::vector<Polygon> polys);
  /// Axis-aligned rectangle polygon.
  static Geometry rectangle(double west, double south, double east, double north);

  GeometryType type() const { return type_; }
  /// Topological dimension: 0 for points, 1 for lines, 2 for areas.
  int dimension() const;
  bool is_areal() const { return dimension() == 2; }

  const std::vector<LatLng>& points() const { return points_; }
  const std::vector<LineString>& lines() const { return lines_; }
  const std::vector<Polygon>& polygons() const { return polygons_; }

  BoundingBox bbox() const;

  friend bool operator==(const Geometry&, const Geometry&) = default;

 private:
  Geometry() = default;

  GeometryType type_ = GeometryType::Point;
  std::vector<LatLng> points_;
  std::vector<LineString> lines_;
  std::vector<Polygon> polygons_;
};

/// Boundary coincidence tolerance in degrees.
inline constexpr double kTopologyEpsilon = 1e-9;

/// Signed shoelace area of a closed ring; positive when counterclockwise.
double signed_ring_area(std::span<const LatLng> ring);
/// Planar area in square degrees (zero for non-areal geometries).
double planar_area(const Geometry& g);

// ---------------------------------------------------------------- WKT

/// Parses the six Simple Features tags. Coordinates are "lng lat".
Geometry parse_wkt(std::string_view text);
/// Serialises with round-trip precision; parse_wkt(serialize_wkt(g)) == g.
std::string serialize_wkt(const Geometry& g);

// ---------------------------------------------------------------- DE-9IM

enum class Location : std::uint8_t { Interior = 0, Boundary = 1, Exterior = 2 };

/// Dimensionally extended nine-intersection matrix. Entries are -1 (F), 0, 1 or 2.
class DE9IM {
 public:
  DE9IM() { cells_.fill(-1); }

  int at(Location a, Location b) const { return cells_[index(a, b)]; }
  /// Raises the entry to at least `dim`.
  void raise(Location a, Location b, int dim);
  DE9IM transposed() const;

  /// Tests a nine-character pattern over {T, F, *, 0, 1, 2}.
  bool matches(std::string_view pattern) const;
  /// Nine characters over {F, 0, 1, 2}, row-major.
  std::string str() const;

  friend bool operator==(const DE9IM&, const DE9IM&) = default;

 private:
  static std::size_t index(Location a, Location b) {
    return static_cast<std::size_t>(a) * 3 + static_cast<std::size_t>(b);
  }
  std::array<std::int8_t, 9> cells_{};
};

enum class SpatialPredicate {
  Equals,
  Disjoint,
  Intersects,
  Touches,
  Within,
  Contains,
  Overlaps,
  Crosses,
};

inline constexpr std::array<SpatialPredicate, 8> kAllPredicates = {
    SpatialPredicate::Equals,   SpatialPredicate::Disjoint, SpatialPredicate::Intersects,
    SpatialPredicate::Touches,  SpatialPredicate::Within,   SpatialPredicate::Contains,
    SpatialPredicate::Overlaps, SpatialPredicate::Crosses,
};

/// "sfWithin", "sfContains", ...
std::string_view predicate_name(SpatialPredicate p);
std::optional<SpatialPredicate> predicate_from_name(std::string_view name);

Location locate(const Geometry& g, LatLng p);

DE9IM relate(const Geometry& a, const Geometry& b);

/// Applies the OGC mask for `p` to a matrix computed for operands of the
/// given dimensions.
bool holds(const DE9IM& m, SpatialPredicate p, int dim_a, int dim_b);
bool predicate(const Geometry& a, const Geometry& b, SpatialPredicate p);

// ---------------------------------------------------------------- RCC-8

enum class RCC8 { DC, EC, PO, EQ, TPP, NTPP, TPPi, NTPPi };

std::string_view to_string(RCC8 r);
RCC8 converse(RCC8 r);
/// Both operands must be areal.
RCC8 rcc8_of(const Geometry& a, const Geometry& b);
RCC8 rcc8_from_matrix(const DE9IM& m);

// ---------------------------------------------------------------- sphere

/// True when `p` lies inside (or on) a convex spherical polygon whose
/// vertices are given counterclockwise and joined by great-circle arcs.
bool spherical_polygon_contains(std::span<const LatLng> ccw_vertices, LatLng p);

}  // namespace kwg
