#include "kwg/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "kwg/error.hpp"
#include "planar.hpp"

namespace kwg {

LatLng normalized(LatLng p) {
  if (!std::isfinite(p.lat) || !std::isfinite(p.lng)) {
    throw Error(ErrorKind::InvalidArgument, "coordinate is not finite");
  }
  if (p.lat < -90.0 || p.lat > 90.0) {
    throw Error(ErrorKind::InvalidArgument, "latitude out of range: " + std::to_string(p.lat));
  }
  if (p.lng < -180.0 || p.lng > 180.0) {
    throw Error(ErrorKind::InvalidArgument, "longitude out of range: " + std::to_string(p.lng));
  }
  if (p.lng == -180.0) p.lng = 180.0;
  return p;
}

std::string_view to_string(GeometryType type) {
  switch (type) {
    case GeometryType::Point: return "POINT";
    case GeometryType::LineString: return "LINESTRING";
    case GeometryType::Polygon: return "POLYGON";
    case GeometryType::MultiPoint: return "MULTIPOINT";
    case GeometryType::MultiLineString: return "MULTILINESTRING";
    case GeometryType::MultiPolygon: return "MULTIPOLYGON";
  }
  return "?";
}

namespace {

void check_coordinate(LatLng p) {
  if (!std::isfinite(p.lat) || !std::isfinite(p.lng) || p.lat < -90.0 || p.lat > 90.0 ||
      p.lng < -180.0 || p.lng > 180.0) {
    throw Error(ErrorKind::Data, "coordinate out of range: (" + std::to_string(p.lng) + " " +
                                     std::to_string(p.lat) + ")");
  }
}

void check_no_repeats(std::span<const LatLng> pts, const char* what) {
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (planar::near(pts[i - 1], pts[i])) {
      throw Error(ErrorKind::Data, std::string(what) + " has repeated consecutive vertices");
    }
  }
}

void check_simple_ring(const Ring& ring) {
  const std::size_t n = ring.size() - 1;  // segment count
  for (std::size_t i = 0; i < n; ++i) {
    const LatLng a = ring[i], b = ring[i + 1];
    for (std::size_t j = i + 1; j < n; ++j) {
      const LatLng c = ring[j], d = ring[j + 1];
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) {
        // Shared vertex only: the far endpoint of one must not lie on the other.
        const LatLng far_cd = (j == i + 1) ? d : c;
        const LatLng far_ab = (j == i + 1) ? a : b;
        if (planar::on_segment(far_cd, a, b) || planar::on_segment(far_ab, c, d)) {
          throw Error(ErrorKind::Data, "ring is self-intersecting (spike)");
        }
        continue;
      }
      if (planar::segments_touch(a, b, c, d)) {
        throw Error(ErrorKind::Data, "ring is self-intersecting");
      }
    }
  }
}

void normalise_ring(Ring& ring, bool counterclockwise, const char* what) {
  if (ring.size() < 4) {
    throw Error(ErrorKind::Data, std::string(what) + " needs at least 4 vertices");
  }
  if (ring.front() != ring.back()) {
    throw Error(ErrorKind::Data, std::string(what) + " is not closed");
  }
  for (const auto& p : ring) check_coordinate(p);
  check_no_repeats(ring, what);
  const double area = signed_ring_area(ring);
  if (std::abs(area) <= kTopologyEpsilon * kTopologyEpsilon) {
    throw Error(ErrorKind::Data, std::string(what) + " has zero area");
  }
  check_simple_ring(ring);
  if ((area > 0) != counterclockwise) std::reverse(ring.begin(), ring.end());
}

void normalise_polygon(Polygon& poly) {
  normalise_ring(poly.outer, true, "outer ring");
  for (auto& hole : poly.holes) normalise_ring(hole, false, "inner ring");
}

void check_line(const LineString& line) {
  if (line.size() < 2) throw Error(ErrorKind::Data, "linestring needs at least 2 vertices");
  for (const auto& p : line) check_coordinate(p);
  check_no_repeats(line, "linestring");
}

}  // namespace

Geometry Geometry::point(LatLng p) {
  check_coordinate(p);
  Geometry g;
  g.type_ = GeometryType::Point;
  g.points_ = {p};
  return g;
}

Geometry Geometry::multi_point(std::vector<LatLng> points) {
  if (points.empty()) throw Error(ErrorKind::Data, "empty multipoint");
  for (const auto& p : points) check_coordinate(p);
  Geometry g;
  g.type_ = GeometryType::MultiPoint;
  g.points_ = std::move(points);
  return g;
}

Geometry Geometry::line_string(LineString line) {
  check_line(line);
  Geometry g;
  g.type_ = GeometryType::LineString;
  g.lines_ = {std::move(line)};
  return g;
}

Geometry Geometry::multi_line_string(std::vector<LineString> lines) {
  if (lines.empty()) throw Error(ErrorKind::Data, "empty multilinestring");
  for (const auto& l : lines) check_line(l);
  Geometry g;
  g.type_ = GeometryType::MultiLineString;
  g.lines_ = std::move(lines);
  return g;
}

Geometry Geometry::polygon(Polygon poly) {
  normalise_polygon(poly);
  Geometry g;
  g.type_ = GeometryType::Polygon;
  g.polygons_ = {std::move(poly)};
  return g;
}

Geometry Geometry::multi_polygon(std::vector<Polygon> polys) {
  if (polys.empty()) throw Error(ErrorKind::Data, "empty multipolygon");
  for (auto& p : polys) normalise_polygon(p);
  Geometry g;
  g.type_ = GeometryType::MultiPolygon;
  g.polygons_ = std::move(polys);
  return g;
}

Geometry Geometry::rectangle(double west, double south, double east, double north) {
  Polygon p;
  p.outer = {{south, west}, {south, east}, {north, east}, {north, west}, {south, west}};
  return polygon(std::move(p));
}

int Geometry::dimension() const {
  switch (type_) {
    case GeometryType::Point:
    case GeometryType::MultiPoint: return 0;
    case GeometryType::LineString:
    case GeometryType::MultiLineString: return 1;
    default: return 2;
  }
}

BoundingBox Geometry::bbox() const {
  BoundingBox box{180.0, 90.0, -180.0, -90.0};
  auto add = [&](const LatLng& p) {
    box.west = std::min(box.west, p.lng);
    box.east = std::max(box.east, p.lng);
    box.south = std::min(box.south, p.lat);
    box.north = std::max(box.north, p.lat);
  };
  for (const auto& p : points_) add(p);
  for (const auto& l : lines_)
    for (const auto& p : l) add(p);
  for (const auto& poly : polygons_)
    for (const auto& p : poly.outer) add(p);
  return box;
}

double signed_ring_area(std::span<const LatLng> ring) {
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    sum += ring[i].lng * ring[i + 1].lat - ring[i + 1].lng * ring[i].lat;
  }
  return 0.5 * sum;
}

double planar_area(const Geometry& g) {
  double total = 0.0;
  for (const auto& poly : g.polygons()) {
    total += signed_ring_area(poly.outer);
    for (const auto& h : poly.holes) total += signed_ring_area(h);
  }
  return total;
}

bool spherical_polygon_contains(std::span<const LatLng> ccw_vertices, LatLng p) {
  auto to_xyz = [](LatLng q) {
    const double lat = q.lat * kDegToRad, lng = q.lng * kDegToRad;
    return Eigen::Vector3d(std::cos(lat) * std::cos(lng), std::cos(lat) * std::sin(lng),
                           std::sin(lat));
  };
  const Eigen::Vector3d x = to_xyz(p);
  const std::size_t n = ccw_vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector3d a = to_xyz(ccw_vertices[i]);
    const Eigen::Vector3d b = to_xyz(ccw_vertices[(i + 1) % n]);
    if (a.cross(b).dot(x) < -1e-15) return false;
  }
  return true;
}

}  // namespace kwg
