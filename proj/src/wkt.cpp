#include <cctype>
#include <charconv>
#include <string>

#include "kwg/error.hpp"
#include "kwg/geometry.hpp"

namespace kwg {
namespace {

class WktReader {
 public:
  explicit WktReader(std::string_view text) : text_(text) {}

  Geometry read() {
    const std::string tag = keyword();
    Geometry g = read_tagged(tag);
    skip_ws();
    if (pos_ != text_.size()) fail("trailing characters after geometry");
    return g;
  }

 private:
  Geometry read_tagged(const std::string& tag) {
    try {
      if (tag == "POINT") {
        expect('(');
        LatLng p = coord();
        expect(')');
        return Geometry::point(p);
      }
      if (tag == "LINESTRING") return Geometry::line_string(coord_list());
      if (tag == "POLYGON") return Geometry::polygon(polygon_text());
      if (tag == "MULTIPOINT") {
        std::vector<LatLng> pts;
        expect('(');
        do {
          if (peek() == '(') {
            expect('(');
            pts.push_back(coord());
            expect(')');
          } else {
            pts.push_back(coord());
          }
        } while (accept(','));
        expect(')');
        return Geometry::multi_point(std::move(pts));
      }
      if (tag == "MULTILINESTRING") {
        std::vector<LineString> lines;
        expect('(');
        do lines.push_back(coord_list());
        while (accept(','));
        expect(')');
        return Geometry::multi_line_string(std::move(lines));
      }
      if (tag == "MULTIPOLYGON") {
        std::vector<Polygon> polys;
        expect('(');
        do polys.push_back(polygon_text());
        while (accept(','));
        expect(')');
        return Geometry::multi_polygon(std::move(polys));
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      fail(std::string("invalid geometry: ") + e.what());
    }
    fail("unknown geometry tag '" + tag + "'");
  }

  Polygon polygon_text() {
    Polygon poly;
    expect('(');
    poly.outer = coord_list();
    while (accept(',')) poly.holes.push_back(coord_list());
    expect(')');
    return poly;
  }

  std::vector<LatLng> coord_list() {
    std::vector<LatLng> pts;
    expect('(');
    do pts.push_back(coord());
    while (accept(','));
    expect(')');
    return pts;
  }

  LatLng coord() {
    const double x = number();
    const double y = number();
    skip_ws();
    if (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
                                text_[pos_] == '-' || text_[pos_] == '+' || text_[pos_] == '.')) {
      fail("coordinate arity must be 2");
    }
    return {y, x};
  }

  double number() {
    skip_ws();
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    if (begin != end && *begin == '+') ++begin;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc()) fail("expected number");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return value;
  }

  std::string keyword() {
    skip_ws();
    std::string word;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) {
      word.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(text_[pos_]))));
      ++pos_;
    }
    if (word.empty()) fail("expected geometry tag");
    return word;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool accept(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (c == ')' || c == '(') fail(std::string("unbalanced parentheses: expected '") + c + "'");
      fail(std::string("expected '") + c + "'");
    }
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& message) {
    throw ParseError("WKT: " + message, 1, static_cast<int>(pos_) + 1);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void append_number(std::string& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

void append_coords(std::string& out, std::span<const LatLng> pts) {
  out += '(';
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) out += ", ";
    append_number(out, pts[i].lng);
    out += ' ';
    append_number(out, pts[i].lat);
  }
  out += ')';
}

void append_polygon(std::string& out, const Polygon& poly) {
  out += '(';
  append_coords(out, poly.outer);
  for (const auto& h : poly.holes) {
    out += ", ";
    append_coords(out, h);
  }
  out += ')';
}

}  // namespace

Geometry parse_wkt(std::string_view text) { return WktReader(text).read(); }

std::string serialize_wkt(const Geometry& g) {
  std::string out(to_string(g.type()));
  out += ' ';
  switch (g.type()) {
    case GeometryType::Point:
    case GeometryType::MultiPoint:
      append_coords(out, g.points());
      break;
    case GeometryType::LineString:
      append_coords(out, g.lines().front());
      break;
    case GeometryType::MultiLineString:
      out += '(';
      for (std::size_t i = 0; i < g.lines().size(); ++i) {
        if (i) out += ", ";
        append_coords(out, g.lines()[i]);
      }
      out += ')';
      break;
    case GeometryType::Polygon:
      append_polygon(out, g.polygons().front());
      break;
    case GeometryType::MultiPolygon:
      out += '(';
      for (std::size_t i = 0; i < g.polygons().size(); ++i) {
        if (i) out += ", ";
        append_polygon(out, g.polygons()[i]);
      }
      out += ')';
      break;
  }
  return out;
}

}  // namespace kwg
