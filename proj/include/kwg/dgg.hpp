#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "kwg/geometry.hpp"
#include "kwg/latlng.hpp"

namespace kwg::dgg {

inline constexpr int kFaceCount = 6;
inline constexpr int kMaxLevel = 30;
/// Mean Earth radius in kilometres.
inline constexpr double kEarthRadiusKm = 6371.0088;

/// Identifier of a cube-face quadtree cell. The packed form is
/// face (3 bits) | level (5 bits) | path (2 bits per digit, left aligned
/// in 60 bits); ordering follows the packed value.
class CellId {
 public:
  static CellId face_cell(int face);
  /// Cell at `level` whose (i, j) position on the face grid is given.
  static CellId from_face_ij(int face, int level, std::uint32_t i, std::uint32_t j);
  /// Face plus quadrant digits, most significant first.
  static CellId from_digits(int face, std::span<const int> digits);

  int face() const { return face_; }
  int level() const { return level_; }
  /// Digit at depth k (1-based), each in 0..3. Digit = (i bit << 1) | j bit.
  int digit(int k) const;
  std::uint32_t i() const;
  std::uint32_t j() const;
  /// Right-aligned path bits (2 * level wide).
  std::uint64_t path() const { return path_; }
  unsigned __int128 packed() const;

  CellId parent() const;
  CellId ancestor(int level) const;
  std::array<CellId, 4> children() const;
  bool contains(const CellId& other) const;

  friend bool operator==(const CellId&, const CellId&) = default;
  friend auto operator<=>(const CellId& a, const CellId& b) {
    return std::tie(a.face_, a.level_, a.path_) <=> std::tie(b.face_, b.level_, b.path_);
  }

 private:
  CellId(int face, int level, std::uint64_t path)
      : face_(static_cast<std::uint8_t>(face)), level_(static_cast<std::uint8_t>(level)), path_(path) {}

  std::uint8_t face_ = 0;
  std::uint8_t level_ = 0;
  std::uint64_t path_ = 0;
};

struct CellPolygon {
  std::array<LatLng, 4> vertices;  // counterclockwise seen from outside the sphere
  int level = 0;
};

CellId cell_from_point(LatLng p, int level);
CellPolygon cell_polygon(const CellId& c);
/// Spherical area of the cell on a sphere of radius kEarthRadiusKm.
double cell_area_km2(const CellId& c);

/// "<face>-<level>-<base-4 path>", e.g. "2-3-013".
std::string token(const CellId& c);
CellId cell_from_token(std::string_view s);

/// Planar lng/lat footprint of the cell. Pole corners are expanded to a
/// top/bottom edge and antimeridian-crossing cells are split, so the result
/// may be a MultiPolygon.
Geometry cell_geometry(const CellId& c);

/// True if the spherical cell contains p (boundary inclusive).
bool cell_contains(const CellId& c, LatLng p);

/// Every level-`level` cell whose planar footprint intersects g, sorted.
/// Geometries crossing the antimeridian are rejected.
std::vector<CellId> cover_geometry(const Geometry& g, int level);

/// Outline of a connected, hole-free set of same-face, same-level cells,
/// sharing vertex coordinates with cell_geometry of its members.
Geometry union_of_cells(std::span<const CellId> cells);

/// All cells at a level (intended for small levels).
std::vector<CellId> cells_at_level(int level);

}  // namespace kwg::dgg
