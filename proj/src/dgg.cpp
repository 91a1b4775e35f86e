#include "kwg/dgg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "kwg/error.hpp"

namespace kwg::dgg {
namespace {

using Eigen::Vector3d;

void check_level(int level) {
  if (level < 0 || level > kMaxLevel) {
    throw Error(ErrorKind::InvalidArgument, "level out of range: " + std::to_string(level));
  }
}

void check_face(int face) {
  if (face < 0 || face >= kFaceCount) {
    throw Error(ErrorKind::InvalidArgument, "face out of range: " + std::to_string(face));
  }
}

// Unnormalised cube point for face coordinates (u, v) in [-1, 1]. The
// components are exact permutations/negations of (1, u, v), so points on a
// shared face edge come out bit-identical from either face.
Vector3d face_uv_to_xyz(int face, double u, double v) {
  switch (face) {
    case 0: return {1.0, u, v};
    case 1: return {-u, 1.0, v};
    case 2: return {-u, -v, 1.0};
    case 3: return {-1.0, -v, -u};
    case 4: return {v, -1.0, -u};
    default: return {v, u, -1.0};
  }
}

Vector3d latlng_to_xyz(LatLng p) {
  const double lat = p.lat * kDegToRad, lng = p.lng * kDegToRad;
  return {std::cos(lat) * std::cos(lng), std::cos(lat) * std::sin(lng), std::sin(lat)};
}

LatLng xyz_to_latlng(const Vector3d& x) {
  const double h = std::hypot(x.x(), x.y());
  LatLng p;
  p.lat = std::atan2(x.z(), h) * kRadToDeg;
  p.lng = h == 0.0 ? 0.0 : std::atan2(x.y(), x.x()) * kRadToDeg;
  if (p.lng == -180.0) p.lng = 180.0;
  return p;
}

struct FaceST {
  int face;
  double s;
  double t;
};

// Face assignment; ties go to the lowest face index, which is the smallest id.
FaceST xyz_to_face_st(const Vector3d& x) {
  const std::array<double, 3> a = {std::abs(x.x()), std::abs(x.y()), std::abs(x.z())};
  int best = -1;
  int best_face = 99;
  for (int axis = 0; axis < 3; ++axis) {
    const double c = x[axis];
    const int face = axis + (c < 0 ? 3 : 0);
    if (best < 0 || a[axis] > a[best] || (a[axis] == a[best] && face < best_face)) {
      best = axis;
      best_face = face;
    }
  }
  double u = 0, v = 0;
  switch (best_face) {
    case 0: u = x.y() / x.x(); v = x.z() / x.x(); break;
    case 1: u = -x.x() / x.y(); v = x.z() / x.y(); break;
    case 2: u = -x.x() / x.z(); v = -x.y() / x.z(); break;
    case 3: u = x.z() / x.x(); v = x.y() / x.x(); break;
    case 4: u = x.z() / x.y(); v = -x.x() / x.y(); break;
    default: u = -x.y() / x.z(); v = -x.x() / x.z(); break;
  }
  return {best_face, std::clamp(0.5 * (u + 1.0), 0.0, 1.0), std::clamp(0.5 * (v + 1.0), 0.0, 1.0)};
}

// Grid index of coordinate s at a level. A coordinate exactly on a cell
// boundary goes to the lower index, i.e. the numerically smaller CellId.
std::uint32_t grid_index(double s, int level) {
  const double n = std::ldexp(1.0, level);
  const double scaled = s * n;  // exact: multiplication by a power of two
  const double k = std::ceil(scaled) - 1.0;
  return static_cast<std::uint32_t>(std::clamp(k, 0.0, n - 1.0));
}

// Corner of the level grid at integer position (i, j), 0 <= i, j <= 2^level.
Vector3d grid_corner(int face, int level, std::uint64_t i, std::uint64_t j) {
  const double n = std::ldexp(1.0, level);
  const double u = 2.0 * (static_cast<double>(i) / n) - 1.0;
  const double v = 2.0 * (static_cast<double>(j) / n) - 1.0;
  return face_uv_to_xyz(face, u, v);
}

double wrap_near(double lng, double ref) {
  while (lng - ref > 180.0) lng -= 360.0;
  while (lng - ref < -180.0) lng += 360.0;
  return lng;
}

// Sutherland-Hodgman clip of a closed ring against x <= limit (keep_below)
// or x >= limit.
Ring clip_ring(const Ring& ring, double limit, bool keep_below) {
  auto inside = [&](const LatLng& p) { return keep_below ? p.lng <= limit : p.lng >= limit; };
  Ring out;
  for (std::size_t k = 0; k + 1 < ring.size(); ++k) {
    const LatLng a = ring[k], b = ring[k + 1];
    const bool ia = inside(a), ib = inside(b);
    if (ia) out.push_back(a);
    if (ia != ib) {
      const double t = (limit - a.lng) / (b.lng - a.lng);
      out.push_back({a.lat + (b.lat - a.lat) * t, limit});
    }
  }
  Ring dedup;
  for (const auto& p : out)
    if (dedup.empty() || dedup.back() != p) dedup.push_back(p);
  while (dedup.size() > 1 && dedup.front() == dedup.back()) dedup.pop_back();
  if (!dedup.empty()) dedup.push_back(dedup.front());
  return dedup;
}

Geometry planar_from_unwrapped(Ring ring) {
  double lo = 1e9, hi = -1e9;
  for (const auto& p : ring) {
    lo = std::min(lo, p.lng);
    hi = std::max(hi, p.lng);
  }
  if (lo >= -180.0 && hi <= 180.0) return Geometry::polygon({std::move(ring), {}});
  const double limit = hi > 180.0 ? 180.0 : -180.0;
  const double shift = hi > 180.0 ? -360.0 : 360.0;
  std::vector<Polygon> parts;
  for (bool below : {true, false}) {
    Ring part = clip_ring(ring, limit, below);
    const bool shifted = (limit > 0) != below;
    if (shifted)
      for (auto& p : part) p.lng += shift;
    for (auto& p : part) p.lng = std::clamp(p.lng, -180.0, 180.0);
    if (part.size() >= 4 && std::abs(signed_ring_area(part)) > 1e-18) parts.push_back({std::move(part), {}});
  }
  if (parts.size() == 1) return Geometry::polygon(std::move(parts.front()));
  return Geometry::multi_polygon(std::move(parts));
}

struct LngLatBox {
  double west, south, east, north;
};

// Conservative lng/lat extent of the spherical cell (edges sampled along
// their great circles, plus a margin). Used only for pruning.
LngLatBox cell_extent(const CellId& c) {
  const int level = c.level();
  const std::uint64_t i = c.i(), j = c.j();
  constexpr int kSamples = 8;
  std::vector<LatLng> pts;
  const double n = std::ldexp(1.0, level);
  for (int k = 0; k <= kSamples; ++k) {
    const double f = static_cast<double>(k) / kSamples;
    const double s0 = static_cast<double>(i) / n, s1 = static_cast<double>(i + 1) / n;
    const double t0 = static_cast<double>(j) / n, t1 = static_cast<double>(j + 1) / n;
    const double sf = s0 + (s1 - s0) * f, tf = t0 + (t1 - t0) * f;
    for (auto [s, t] : {std::pair{sf, t0}, std::pair{sf, t1}, std::pair{s0, tf}, std::pair{s1, tf}}) {
      pts.push_back(xyz_to_latlng(face_uv_to_xyz(c.face(), 2 * s - 1, 2 * t - 1)));
    }
  }
  LngLatBox box{1e9, 90.0, -1e9, -90.0};
  const double ref = pts.front().lng;
  bool pole = false;
  for (auto p : pts) {
    if (std::abs(p.lat) >= 90.0 - 1e-12) pole = true;
    box.south = std::min(box.south, p.lat);
    box.north = std::max(box.north, p.lat);
    const double l = wrap_near(p.lng, ref);
    box.west = std::min(box.west, l);
    box.east = std::max(box.east, l);
  }
  if (cell_contains(c, {90.0, 0.0})) {
    pole = true;
    box.north = 90.0;
  }
  if (cell_contains(c, {-90.0, 0.0})) {
    pole = true;
    box.south = -90.0;
  }
  const double margin = 1e-7 + 0.02 * std::max(box.north - box.south, box.east - box.west);
  box.south = std::max(-90.0, box.south - margin);
  box.north = std::min(90.0, box.north + margin);
  box.west -= margin;
  box.east += margin;
  if (pole || box.west < -180.0 || box.east > 180.0 || box.east - box.west >= 180.0) {
    box.west = -180.0;
    box.east = 180.0;
  }
  return box;
}

void check_not_crossing_antimeridian(const Geometry& g) {
  auto check = [](std::span<const LatLng> pts) {
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
      const bool along_pole = std::abs(pts[k].lat) == 90.0 && pts[k + 1].lat == pts[k].lat;
      if (std::abs(pts[k + 1].lng - pts[k].lng) > 180.0 && !along_pole) {
        throw Error(ErrorKind::Unsupported, "geometry crosses the antimeridian; covering is unsupported");
      }
    }
  };
  for (const auto& l : g.lines()) check(l);
  for (const auto& poly : g.polygons()) {
    check(poly.outer);
    for (const auto& h : poly.holes) check(h);
  }
}

}  // namespace

// ------------------------------------------------------------------ CellId

CellId CellId::face_cell(int face) {
  check_face(face);
  return CellId(face, 0, 0);
}

CellId CellId::from_face_ij(int face, int level, std::uint32_t i, std::uint32_t j) {
  check_face(face);
  check_level(level);
  const std::uint64_t n = std::uint64_t{1} << level;
  if (i >= n || j >= n) throw Error(ErrorKind::InvalidArgument, "cell index out of range");
  std::uint64_t path = 0;
  for (int k = level - 1; k >= 0; --k) {
    const std::uint64_t d = (((i >> k) & 1u) << 1) | ((j >> k) & 1u);
    path = (path << 2) | d;
  }
  return CellId(face, level, path);
}

CellId CellId::from_digits(int face, std::span<const int> digits) {
  check_face(face);
  check_level(static_cast<int>(digits.size()));
  std::uint64_t path = 0;
  for (int d : digits) {
    if (d < 0 || d > 3) throw Error(ErrorKind::InvalidArgument, "path digit out of range");
    path = (path << 2) | static_cast<std::uint64_t>(d);
  }
  return CellId(face, static_cast<int>(digits.size()), path);
}

int CellId::digit(int k) const {
  if (k < 1 || k > level_) throw Error(ErrorKind::InvalidArgument, "digit index out of range");
  return static_cast<int>((path_ >> (2 * (level_ - k))) & 3u);
}

std::uint32_t CellId::i() const {
  std::uint32_t v = 0;
  for (int k = 1; k <= level_; ++k) v = (v << 1) | static_cast<std::uint32_t>(digit(k) >> 1);
  return v;
}

std::uint32_t CellId::j() const {
  std::uint32_t v = 0;
  for (int k = 1; k <= level_; ++k) v = (v << 1) | static_cast<std::uint32_t>(digit(k) & 1);
  return v;
}

unsigned __int128 CellId::packed() const {
  const unsigned __int128 aligned = static_cast<unsigned __int128>(path_) << (2 * (kMaxLevel - level_));
  return (static_cast<unsigned __int128>(face_) << 65) | (static_cast<unsigned __int128>(level_) << 60) |
         aligned;
}

CellId CellId::parent() const {
  if (level_ == 0) throw Error(ErrorKind::InvalidArgument, "level-0 cell has no parent");
  return CellId(face_, level_ - 1, path_ >> 2);
}

CellId CellId::ancestor(int level) const {
  if (level < 0 || level > level_) throw Error(ErrorKind::InvalidArgument, "ancestor level out of range");
  return CellId(face_, level, path_ >> (2 * (level_ - level)));
}

std::array<CellId, 4> CellId::children() const {
  if (level_ >= kMaxLevel) throw Error(ErrorKind::InvalidArgument, "cell at maximum level has no children");
  return {CellId(face_, level_ + 1, path_ << 2), CellId(face_, level_ + 1, (path_ << 2) | 1),
          CellId(face_, level_ + 1, (path_ << 2) | 2), CellId(face_, level_ + 1, (path_ << 2) | 3)};
}

bool CellId::contains(const CellId& other) const {
  return other.face_ == face_ && other.level_ >= level_ && other.ancestor(level_) == *this;
}

// ------------------------------------------------------------------ grid ops

CellId cell_from_point(LatLng p, int level) {
  check_level(level);
  p = normalized(p);
  const FaceST fst = xyz_to_face_st(latlng_to_xyz(p));
  return CellId::from_face_ij(fst.face, level, grid_index(fst.s, level), grid_index(fst.t, level));
}

CellPolygon cell_polygon(const CellId& c) {
  const std::uint64_t i = c.i(), j = c.j();
  CellPolygon poly;
  poly.level = c.level();
  poly.vertices = {xyz_to_latlng(grid_corner(c.face(), c.level(), i, j)),
                   xyz_to_latlng(grid_corner(c.face(), c.level(), i + 1, j)),
                   xyz_to_latlng(grid_corner(c.face(), c.level(), i + 1, j + 1)),
                   xyz_to_latlng(grid_corner(c.face(), c.level(), i, j + 1))};
  return poly;
}

namespace {

// L'Huilier's formula for the spherical excess of a unit-sphere triangle.
double spherical_excess(const Vector3d& a, const Vector3d& b, const Vector3d& c) {
  auto side = [](const Vector3d& x, const Vector3d& y) { return std::atan2(x.cross(y).norm(), x.dot(y)); };
  const double sa = side(b, c), sb = side(c, a), sc = side(a, b);
  const double s = 0.5 * (sa + sb + sc);
  const double prod = std::tan(0.5 * s) * std::tan(0.5 * (s - sa)) * std::tan(0.5 * (s - sb)) *
                      std::tan(0.5 * (s - sc));
  return 4.0 * std::atan(std::sqrt(std::max(0.0, prod)));
}

}  // namespace

double cell_area_km2(const CellId& c) {
  const std::uint64_t i = c.i(), j = c.j();
  const Vector3d v0 = grid_corner(c.face(), c.level(), i, j).normalized();
  const Vector3d v1 = grid_corner(c.face(), c.level(), i + 1, j).normalized();
  const Vector3d v2 = grid_corner(c.face(), c.level(), i + 1, j + 1).normalized();
  const Vector3d v3 = grid_corner(c.face(), c.level(), i, j + 1).normalized();
  const double excess = spherical_excess(v0, v1, v2) + spherical_excess(v0, v2, v3);
  return excess * kEarthRadiusKm * kEarthRadiusKm;
}

std::string token(const CellId& c) {
  std::string out = std::to_string(c.face()) + "-" + std::to_string(c.level()) + "-";
  for (int k = 1; k <= c.level(); ++k) out.push_back(static_cast<char>('0' + c.digit(k)));
  return out;
}

CellId cell_from_token(std::string_view s) {
  auto fail = [&](const std::string& why) -> CellId {
    throw Error(ErrorKind::InvalidArgument, "malformed cell token '" + std::string(s) + "': " + why);
  };
  const auto d1 = s.find('-');
  if (d1 == std::string_view::npos) return fail("missing '-'");
  const auto d2 = s.find('-', d1 + 1);
  if (d2 == std::string_view::npos) return fail("missing second '-'");
  int face = -1, level = -1;
  auto parse_int = [](std::string_view part, int& out) {
    if (part.empty()) return false;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
    return ec == std::errc() && ptr == part.data() + part.size();
  };
  if (!parse_int(s.substr(0, d1), face)) return fail("bad face");
  if (!parse_int(s.substr(d1 + 1, d2 - d1 - 1), level)) return fail("bad level");
  if (face < 0 || face >= kFaceCount) return fail("face out of range");
  if (level < 0 || level > kMaxLevel) return fail("level out of range");
  const std::string_view digits = s.substr(d2 + 1);
  if (static_cast<int>(digits.size()) != level) return fail("path length differs from level");
  std::vector<int> ds;
  for (char ch : digits) {
    if (ch < '0' || ch > '3') return fail("path digit out of range");
    ds.push_back(ch - '0');
  }
  return CellId::from_digits(face, ds);
}

bool cell_contains(const CellId& c, LatLng p) {
  const auto poly = cell_polygon(c);
  return spherical_polygon_contains(poly.vertices, p);
}

Geometry cell_geometry(const CellId& c) {
  const CellPolygon poly = cell_polygon(c);
  const auto& v = poly.vertices;

  const bool north_inside = c.face() == 2 && c.level() == 0;
  const bool south_inside = c.face() == 5 && c.level() == 0;
  if (north_inside || south_inside) {
    std::array<LatLng, 4> sorted = v;
    std::sort(sorted.begin(), sorted.end(), [&](const LatLng& a, const LatLng& b) {
      return north_inside ? a.lng < b.lng : a.lng > b.lng;
    });
    const LatLng first = sorted.front(), last = sorted.back();
    const double edge = north_inside ? 180.0 : -180.0;
    const double pole = north_inside ? 90.0 : -90.0;
    const double span = std::abs(wrap_near(first.lng, last.lng) - last.lng);
    const double t = span == 0 ? 0.5 : std::abs(edge - last.lng) / span;
    const double lat_cut = last.lat + (first.lat - last.lat) * t;
    Ring ring(sorted.begin(), sorted.end());
    ring.push_back({lat_cut, edge});
    ring.push_back({pole, edge});
    ring.push_back({pole, -edge});
    ring.push_back({lat_cut, -edge});
    ring.push_back(ring.front());
    return Geometry::polygon({std::move(ring), {}});
  }

  int pole_index = -1;
  for (int k = 0; k < 4; ++k)
    if (std::abs(v[static_cast<std::size_t>(k)].lat) >= 90.0 - 1e-12) pole_index = k;

  Ring ring;
  const double ref = v[static_cast<std::size_t>(pole_index == 0 ? 1 : 0)].lng;
  for (int k = 0; k < 4; ++k) {
    LatLng p = v[static_cast<std::size_t>(k)];
    if (k == pole_index) {
      const LatLng prev = v[static_cast<std::size_t>((k + 3) % 4)];
      const LatLng next = v[static_cast<std::size_t>((k + 1) % 4)];
      ring.push_back({p.lat, wrap_near(prev.lng, ref)});
      ring.push_back({p.lat, wrap_near(next.lng, ref)});
      continue;
    }
    p.lng = wrap_near(p.lng, ref);
    ring.push_back(p);
  }
  ring.push_back(ring.front());
  return planar_from_unwrapped(std::move(ring));
}

std::vector<CellId> cover_geometry(const Geometry& g, int level) {
  check_level(level);
  check_not_crossing_antimeridian(g);
  const BoundingBox gb = g.bbox();
  std::vector<CellId> out;
  std::vector<CellId> stack;
  for (int f = kFaceCount - 1; f >= 0; --f) stack.push_back(CellId::face_cell(f));
  while (!stack.empty()) {
    const CellId c = stack.back();
    stack.pop_back();
    if (c.level() >= 3 || c.level() == level) {
      const LngLatBox e = cell_extent(c);
      const BoundingBox cb{e.west, e.south, e.east, e.north};
      if (!cb.intersects(gb, kTopologyEpsilon)) continue;
    }
    if (c.level() == level) {
      const Geometry cg = cell_geometry(c);
      if (!cg.bbox().intersects(gb, kTopologyEpsilon)) continue;
      if (predicate(cg, g, SpatialPredicate::Intersects)) out.push_back(c);
      continue;
    }
    const auto kids = c.children();
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Geometry union_of_cells(std::span<const CellId> cells) {
  if (cells.empty()) throw Error(ErrorKind::InvalidArgument, "union of zero cells");
  const int face = cells.front().face(), level = cells.front().level();
  using Vertex = std::pair<std::uint64_t, std::uint64_t>;
  std::set<std::pair<Vertex, Vertex>> edges;
  for (const auto& c : cells) {
    if (c.face() != face || c.level() != level) {
      throw Error(ErrorKind::InvalidArgument, "union_of_cells needs cells from one face and level");
    }
    const std::uint64_t i = c.i(), j = c.j();
    const std::array<Vertex, 4> q = {Vertex{i, j}, Vertex{i + 1, j}, Vertex{i + 1, j + 1}, Vertex{i, j + 1}};
    for (int k = 0; k < 4; ++k) {
      const auto e = std::pair{q[static_cast<std::size_t>(k)], q[static_cast<std::size_t>((k + 1) % 4)]};
      const auto rev = std::pair{e.second, e.first};
      if (edges.erase(rev) == 0) edges.insert(e);
    }
  }
  std::map<Vertex, Vertex> next;
  for (const auto& [a, b] : edges) {
    if (!next.emplace(a, b).second) {
      throw Error(ErrorKind::Unsupported, "cell set boundary pinches at a vertex");
    }
  }
  Ring ring;
  const Vertex start = next.begin()->first;
  Vertex cur = start;
  do {
    ring.push_back(xyz_to_latlng(grid_corner(face, level, cur.first, cur.second)));
    cur = next.at(cur);
  } while (cur != start && ring.size() <= next.size());
  if (ring.size() != next.size()) {
    throw Error(ErrorKind::Unsupported, "cell set is not a single hole-free region");
  }
  ring.push_back(ring.front());
  return Geometry::polygon({std::move(ring), {}});
}

std::vector<CellId> cells_at_level(int level) {
  check_level(level);
  std::vector<CellId> out;
  const std::uint32_t n = 1u << level;
  for (int f = 0; f < kFaceCount; ++f)
    for (std::uint32_t i = 0; i < n; ++i)
      for (std::uint32_t j = 0; j < n; ++j) out.push_back(CellId::from_face_ij(f, level, i, j));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace kwg::dgg
