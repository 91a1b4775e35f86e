#include <algorithm>
#include <map>

#include "kwg/error.hpp"
#include "kwg/geometry.hpp"
#include "planar.hpp"

namespace kwg {

void DE9IM::raise(Location a, Location b, int dim) {
  auto& cell = cells_[index(a, b)];
  if (dim > cell) cell = static_cast<std::int8_t>(dim);
}

DE9IM DE9IM::transposed() const {
  DE9IM t;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      t.cells_[static_cast<std::size_t>(b * 3 + a)] = cells_[static_cast<std::size_t>(a * 3 + b)];
  return t;
}

bool DE9IM::matches(std::string_view pattern) const {
  if (pattern.size() != 9) throw Error(ErrorKind::InvalidArgument, "DE-9IM pattern needs 9 chars");
  for (std::size_t i = 0; i < 9; ++i) {
    const int v = cells_[i];
    switch (pattern[i]) {
      case '*': break;
      case 'T': if (v < 0) return false; break;
      case 'F': if (v >= 0) return false; break;
      case '0': if (v != 0) return false; break;
      case '1': if (v != 1) return false; break;
      case '2': if (v != 2) return false; break;
      default: throw Error(ErrorKind::InvalidArgument, "bad DE-9IM pattern character");
    }
  }
  return true;
}

std::string DE9IM::str() const {
  std::string s(9, 'F');
  for (std::size_t i = 0; i < 9; ++i)
    if (cells_[i] >= 0) s[i] = static_cast<char>('0' + cells_[i]);
  return s;
}

namespace {

struct Segment {
  LatLng a, b;
};

// Geometry flattened for relate: directed segments (areal edges keep the
// interior on their left) plus the node points and line boundary.
struct Prepared {
  const Geometry* g = nullptr;
  int dim = 0;
  std::vector<Segment> segments;
  std::vector<LatLng> vertices;
  std::vector<LatLng> line_boundary;
  BoundingBox box;

  explicit Prepared(const Geometry& geom) : g(&geom), dim(geom.dimension()), box(geom.bbox()) {
    for (const auto& p : geom.points()) vertices.push_back(p);
    for (const auto& line : geom.lines()) {
      for (std::size_t i = 0; i + 1 < line.size(); ++i) segments.push_back({line[i], line[i + 1]});
      vertices.insert(vertices.end(), line.begin(), line.end());
    }
    for (const auto& poly : geom.polygons()) {
      auto add_ring = [&](const Ring& r) {
        for (std::size_t i = 0; i + 1 < r.size(); ++i) segments.push_back({r[i], r[i + 1]});
        vertices.insert(vertices.end(), r.begin(), r.end() - 1);
      };
      add_ring(poly.outer);
      for (const auto& h : poly.holes) add_ring(h);
    }
    if (dim == 1) {
      // Mod-2 rule: endpoints shared by an even number of line ends are interior.
      std::vector<std::pair<LatLng, int>> ends;
      auto bump = [&](LatLng p) {
        for (auto& [q, n] : ends)
          if (planar::near(p, q)) {
            ++n;
            return;
          }
        ends.push_back({p, 1});
      };
      for (const auto& line : geom.lines()) {
        bump(line.front());
        bump(line.back());
      }
      for (const auto& [p, n] : ends)
        if (n % 2 == 1) line_boundary.push_back(p);
    }
  }

  Location locate(LatLng p) const {
    switch (dim) {
      case 0:
        for (const auto& q : vertices)
          if (planar::near(p, q)) return Location::Interior;
        return Location::Exterior;
      case 1:
        for (const auto& q : line_boundary)
          if (planar::near(p, q)) return Location::Boundary;
        for (const auto& s : segments)
          if (planar::on_segment(p, s.a, s.b)) return Location::Interior;
        return Location::Exterior;
      default:
        break;
    }
    for (const auto& s : segments)
      if (planar::on_segment(p, s.a, s.b)) return Location::Boundary;
    for (const auto& poly : g->polygons()) {
      bool inside = false;
      auto crossings = [&](const Ring& r) {
        for (std::size_t i = 0; i + 1 < r.size(); ++i) {
          const LatLng a = r[i], b = r[i + 1];
          if ((a.lat > p.lat) != (b.lat > p.lat)) {
            const double x = a.lng + (p.lat - a.lat) * (b.lng - a.lng) / (b.lat - a.lat);
            if (p.lng < x) inside = !inside;
          }
        }
      };
      crossings(poly.outer);
      for (const auto& h : poly.holes) crossings(h);
      if (inside) return Location::Interior;
    }
    return Location::Exterior;
  }

  /// A segment of this geometry that contains `p` and runs parallel to `dir`.
  const Segment* collinear_segment(LatLng p, LatLng dir_a, LatLng dir_b) const {
    for (const auto& s : segments) {
      if (!planar::on_segment(p, s.a, s.b)) continue;
      const double dx1 = dir_b.lng - dir_a.lng, dy1 = dir_b.lat - dir_a.lat;
      const double dx2 = s.b.lng - s.a.lng, dy2 = s.b.lat - s.a.lat;
      const double len = std::hypot(dx1, dy1) * std::hypot(dx2, dy2);
      if (len > 0 && std::abs(dx1 * dy2 - dy1 * dx2) <= 1e-9 * len) return &s;
    }
    return nullptr;
  }
};

BoundingBox segment_box(const Segment& s) {
  return {std::min(s.a.lng, s.b.lng), std::min(s.a.lat, s.b.lat), std::max(s.a.lng, s.b.lng),
          std::max(s.a.lat, s.b.lat)};
}

// Split parameters for every segment of `self` induced by `other`.
std::vector<std::vector<double>> split_params(const Prepared& self, const Prepared& other,
                                              std::vector<LatLng>& nodes) {
  std::vector<std::vector<double>> params(self.segments.size());
  for (std::size_t i = 0; i < self.segments.size(); ++i) {
    const Segment& s = self.segments[i];
    auto& ts = params[i];
    ts = {0.0, 1.0};
    const BoundingBox sb = segment_box(s);
    if (!sb.intersects(other.box, kTopologyEpsilon)) continue;
    for (const auto& q : other.vertices) {
      if (planar::on_segment(q, s.a, s.b)) {
        ts.push_back(planar::project(q, s.a, s.b));
        nodes.push_back(q);
      }
    }
    for (const auto& o : other.segments) {
      if (!sb.intersects(segment_box(o), kTopologyEpsilon)) continue;
      if (auto x = planar::proper_crossing(s.a, s.b, o.a, o.b)) {
        if (!planar::on_segment(o.a, s.a, s.b) && !planar::on_segment(o.b, s.a, s.b) &&
            !planar::on_segment(s.a, o.a, o.b) && !planar::on_segment(s.b, o.a, o.b)) {
          ts.push_back(planar::project(*x, s.a, s.b));
          nodes.push_back(*x);
        }
      }
    }
  }
  return params;
}

// Classifies the pieces of `self`'s segments against `other`. `flip`
// transposes the matrix coordinates so the same routine serves both operands.
void classify_edges(const Prepared& self, const Prepared& other,
                    std::vector<std::vector<double>>& params, bool flip, DE9IM& m) {
  auto raise = [&](Location mine, Location theirs, int dim) {
    if (flip)
      m.raise(theirs, mine, dim);
    else
      m.raise(mine, theirs, dim);
  };
  const Location edge_loc = self.dim == 2 ? Location::Boundary : Location::Interior;
  for (std::size_t i = 0; i < self.segments.size(); ++i) {
    const Segment& s = self.segments[i];
    auto& ts = params[i];
    std::sort(ts.begin(), ts.end());
    const double len = std::sqrt(planar::dist2(s.a, s.b));
    for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
      if ((ts[k + 1] - ts[k]) * len <= kTopologyEpsilon) continue;
      const LatLng pa = planar::lerp(s.a, s.b, ts[k]);
      const LatLng pb = planar::lerp(s.a, s.b, ts[k + 1]);
      const LatLng mid = planar::lerp(s.a, s.b, 0.5 * (ts[k] + ts[k + 1]));
      const Location there = other.locate(mid);
      raise(edge_loc, there, 1);
      if (self.dim != 2) continue;
      // Left of the edge is our interior, right is our exterior.
      if (other.dim != 2 || there == Location::Exterior) {
        raise(Location::Interior, Location::Exterior, 2);
      } else if (there == Location::Interior) {
        raise(Location::Interior, Location::Interior, 2);
        raise(Location::Exterior, Location::Interior, 2);
      } else {
        const Segment* o = other.collinear_segment(mid, pa, pb);
        bool same = true;
        if (o) {
          same = (pb.lng - pa.lng) * (o->b.lng - o->a.lng) + (pb.lat - pa.lat) * (o->b.lat - o->a.lat) > 0;
        }
        if (same) {
          raise(Location::Interior, Location::Interior, 2);
        } else {
          raise(Location::Interior, Location::Exterior, 2);
          raise(Location::Exterior, Location::Interior, 2);
        }
      }
    }
  }
}

}  // namespace

Location locate(const Geometry& g, LatLng p) { return Prepared(g).locate(p); }

DE9IM relate(const Geometry& a, const Geometry& b) {
  const Prepared pa(a), pb(b);
  DE9IM m;
  m.raise(Location::Exterior, Location::Exterior, 2);

  if (!pa.box.intersects(pb.box, kTopologyEpsilon)) {
    // Disjoint fast path: every part of each operand lies in the other's exterior.
    auto fill = [&](const Prepared& p, bool flip) {
      auto r = [&](Location x, int d) {
        if (flip)
          m.raise(Location::Exterior, x, d);
        else
          m.raise(x, Location::Exterior, d);
      };
      r(Location::Interior, p.dim);
      if (p.dim == 2)
        r(Location::Boundary, 1);
      else if (!p.line_boundary.empty())
        r(Location::Boundary, 0);
    };
    fill(pa, false);
    fill(pb, true);
    return m;
  }

  std::vector<LatLng> nodes;
  auto params_a = split_params(pa, pb, nodes);
  auto params_b = split_params(pb, pa, nodes);
  nodes.insert(nodes.end(), pa.vertices.begin(), pa.vertices.end());
  nodes.insert(nodes.end(), pb.vertices.begin(), pb.vertices.end());
  for (const auto& q : nodes) m.raise(pa.locate(q), pb.locate(q), 0);

  classify_edges(pa, pb, params_a, false, m);
  classify_edges(pb, pa, params_b, true, m);
  return m;
}

std::string_view predicate_name(SpatialPredicate p) {
  switch (p) {
    case SpatialPredicate::Equals: return "sfEquals";
    case SpatialPredicate::Disjoint: return "sfDisjoint";
    case SpatialPredicate::Intersects: return "sfIntersects";
    case SpatialPredicate::Touches: return "sfTouches";
    case SpatialPredicate::Within: return "sfWithin";
    case SpatialPredicate::Contains: return "sfContains";
    case SpatialPredicate::Overlaps: return "sfOverlaps";
    case SpatialPredicate::Crosses: return "sfCrosses";
  }
  return "?";
}

std::optional<SpatialPredicate> predicate_from_name(std::string_view name) {
  for (auto p : kAllPredicates)
    if (predicate_name(p) == name) return p;
  return std::nullopt;
}

bool holds(const DE9IM& m, SpatialPredicate p, int dim_a, int dim_b) {
  switch (p) {
    case SpatialPredicate::Equals: return m.matches("T*F**FFF*");
    case SpatialPredicate::Disjoint: return m.matches("FF*FF****");
    case SpatialPredicate::Intersects: return !m.matches("FF*FF****");
    case SpatialPredicate::Touches:
      return m.matches("FT*******") || m.matches("F**T*****") || m.matches("F***T****");
    case SpatialPredicate::Within: return m.matches("T*F**F***");
    case SpatialPredicate::Contains: return m.matches("T*****FF*");
    case SpatialPredicate::Overlaps:
      if (dim_a != dim_b) return false;
      return dim_a == 1 ? m.matches("1*T***T**") : m.matches("T*T***T**");
    case SpatialPredicate::Crosses:
      if (dim_a < dim_b) return m.matches("T*T******");
      if (dim_a > dim_b) return m.matches("T*****T**");
      return dim_a == 1 && m.matches("0********");
  }
  return false;
}

bool predicate(const Geometry& a, const Geometry& b, SpatialPredicate p) {
  return holds(relate(a, b), p, a.dimension(), b.dimension());
}

std::string_view to_string(RCC8 r) {
  switch (r) {
    case RCC8::DC: return "DC";
    case RCC8::EC: return "EC";
    case RCC8::PO: return "PO";
    case RCC8::EQ: return "EQ";
    case RCC8::TPP: return "TPP";
    case RCC8::NTPP: return "NTPP";
    case RCC8::TPPi: return "TPPi";
    case RCC8::NTPPi: return "NTPPi";
  }
  return "?";
}

RCC8 converse(RCC8 r) {
  switch (r) {
    case RCC8::TPP: return RCC8::TPPi;
    case RCC8::NTPP: return RCC8::NTPPi;
    case RCC8::TPPi: return RCC8::TPP;
    case RCC8::NTPPi: return RCC8::NTPP;
    default: return r;
  }
}

RCC8 rcc8_from_matrix(const DE9IM& m) {
  if (holds(m, SpatialPredicate::Disjoint, 2, 2)) return RCC8::DC;
  if (holds(m, SpatialPredicate::Touches, 2, 2)) return RCC8::EC;
  if (holds(m, SpatialPredicate::Equals, 2, 2)) return RCC8::EQ;
  const bool boundary_contact = m.at(Location::Boundary, Location::Boundary) >= 0;
  if (holds(m, SpatialPredicate::Within, 2, 2)) return boundary_contact ? RCC8::TPP : RCC8::NTPP;
  if (holds(m, SpatialPredicate::Contains, 2, 2)) return boundary_contact ? RCC8::TPPi : RCC8::NTPPi;
  return RCC8::PO;
}

RCC8 rcc8_of(const Geometry& a, const Geometry& b) {
  if (!a.is_areal() || !b.is_areal()) {
    throw Error(ErrorKind::InvalidArgument, "RCC-8 requires areal operands");
  }
  return rcc8_from_matrix(relate(a, b));
}

}  // namespace kwg
