#include "kwg/kgmodel.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <regex>

#include "kwg/error.hpp"

namespace kwg {

namespace {

std::string kont(std::string_view local) { return rdf::iri(rdf::ns::kwg_ont, local); }
std::string sosa(std::string_view local) { return rdf::iri(rdf::ns::sosa, local); }
std::string geo(std::string_view local) { return rdf::iri(rdf::ns::geo, local); }
std::string xsd(std::string_view local) { return rdf::iri(rdf::ns::xsd, local); }
std::string otime(std::string_view local) { return rdf::iri(rdf::ns::time, local); }

Triple tri(const std::string& s, const std::string& p, const std::string& o) {
  return {Term::iri(s), Term::iri(p), Term::iri(o)};
}
Triple lit(const std::string& s, const std::string& p, std::string lexical, std::string datatype) {
  return {Term::iri(s), Term::iri(p), Term::literal(std::move(lexical), std::move(datatype))};
}

// Days since 1970-01-01 for a proleptic Gregorian date.
long days_from_civil(long y, unsigned m, unsigned d) {
  y -= m <= 2;
  const long era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long>(doe) - 719468;
}

bool leap(long y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, ptr);
  return s;
}

}  // namespace

// ------------------------------------------------------------ time

DateTime parse_datetime(std::string_view text) {
  static const std::regex re(
      R"(^(-?\d{4})-(\d{2})-(\d{2})(?:T(\d{2}):(\d{2}):(\d{2})(\.\d+)?)?(Z|[+-]\d{2}:\d{2})?$)");
  const std::string s(text);
  std::smatch m;
  if (!std::regex_match(s, m, re)) {
    throw Error(ErrorKind::InvalidArgument, "invalid dateTime '" + s + "'");
  }
  const long y = std::stol(m[1]);
  const int mo = std::stoi(m[2]), d = std::stoi(m[3]);
  const bool has_time = m[4].matched;
  const int hh = has_time ? std::stoi(m[4]) : 0, mi = has_time ? std::stoi(m[5]) : 0,
            ss = has_time ? std::stoi(m[6]) : 0;
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (mo < 1 || mo > 12 || d < 1 || d > kDays[mo - 1] + (mo == 2 && leap(y) ? 1 : 0) || hh > 23 || mi > 59 ||
      ss > 59) {
    throw Error(ErrorKind::InvalidArgument, "dateTime out of range '" + s + "'");
  }
  double frac = m[7].matched ? std::stod("0" + m[7].str()) : 0.0;
  int offset_minutes = 0;
  std::string zone = m[8].matched ? m[8].str() : "Z";
  if (zone != "Z") {
    const int sign = zone[0] == '-' ? -1 : 1;
    const int oh = std::stoi(zone.substr(1, 2)), om = std::stoi(zone.substr(4, 2));
    if (oh > 14 || om > 59) throw Error(ErrorKind::InvalidArgument, "bad zone offset in '" + s + "'");
    offset_minutes = sign * (oh * 60 + om);
  }
  DateTime out;
  out.epoch_seconds = static_cast<double>(days_from_civil(y, mo, d)) * 86400.0 + hh * 3600.0 + mi * 60.0 + ss +
                      frac - offset_minutes * 60.0;
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%s-%s-%sT%02d:%02d:%02d", m[1].str().c_str(), m[2].str().c_str(),
                m[3].str().c_str(), hh, mi, ss);
  out.lexical = buf;
  if (m[7].matched) out.lexical += m[7].str();
  out.lexical += zone;
  return out;
}

Instant make_instant(std::string_view text) { return Instant{parse_datetime(text)}; }

Interval make_interval(std::string_view begin, std::string_view end) {
  Interval i{parse_datetime(begin), parse_datetime(end)};
  if (i.begin.epoch_seconds > i.end.epoch_seconds) {
    throw Error(ErrorKind::InvalidArgument,
                "interval begins after it ends: " + i.begin.lexical + " > " + i.end.lexical);
  }
  return i;
}

namespace {
std::pair<double, double> span_of(const TemporalEntity& t) {
  if (const auto* i = std::get_if<Instant>(&t)) return {i->at.epoch_seconds, i->at.epoch_seconds};
  const auto& iv = std::get<Interval>(t);
  return {iv.begin.epoch_seconds, iv.end.epoch_seconds};
}
}  // namespace

bool temporal_overlaps(const TemporalEntity& a, const TemporalEntity& b) {
  const auto [a0, a1] = span_of(a);
  const auto [b0, b1] = span_of(b);
  return a0 <= b1 && b0 <= a1;
}

// ------------------------------------------------------------ kinds

std::string_view to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::Hazard: return "Hazard";
    case FeatureKind::Region: return "Region";
    case FeatureKind::Cell: return "Cell";
  }
  return "";
}

std::string kind_class(FeatureKind kind) { return kont(to_string(kind)); }

// ------------------------------------------------------------ IRIs

std::string percent_encode(std::string_view text) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    const bool unreserved = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
                            c == '-' || c == '.' || c == '_' || c == '~';
    if (unreserved) {
      out += c;
    } else {
      out += '%';
      out += kHex[u >> 4];
      out += kHex[u & 15];
    }
  }
  return out;
}

std::string slug(std::string_view text) {
  std::string out;
  bool dash = false;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      if (dash && !out.empty()) out += '-';
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      dash = false;
    } else {
      dash = true;
    }
  }
  return out;
}

std::string mint_iri(MintKind kind, std::string_view key) {
  if (key.empty()) throw Error(ErrorKind::InvalidArgument, "cannot mint an IRI from an empty key");
  std::string local;
  switch (kind) {
    case MintKind::Region: local = percent_encode(key); break;
    case MintKind::Cell: {
      const dgg::CellId c = dgg::cell_from_token(key);
      local = "s2.level" + std::to_string(c.level()) + "." + percent_encode(key);
      break;
    }
    case MintKind::Hazard: local = "hazard." + percent_encode(key); break;
    case MintKind::Observation: local = "observation." + percent_encode(key); break;
    case MintKind::Geometry: local = "geometry." + percent_encode(key); break;
    case MintKind::Time: local = "time." + percent_encode(key); break;
    case MintKind::Result: local = "result." + percent_encode(key); break;
    case MintKind::Dataset: local = "dataset." + percent_encode(key); break;
    case MintKind::Theme: local = "theme." + percent_encode(key); break;
    case MintKind::Organization: local = "organization." + percent_encode(key); break;
    case MintKind::Collection: local = "collection." + percent_encode(key); break;
  }
  return rdf::iri(rdf::ns::kwgr, local);
}

std::string observation_key(std::string_view dataset, std::string_view foi_key, std::string_view property_iri) {
  std::string out(dataset);
  out += '.';
  out += foi_key;
  out += '.';
  out += rdf::local_name(property_iri);
  return out;
}

std::string cell_key(const dgg::CellId& cell) {
  return "s2.level" + std::to_string(cell.level()) + "." + dgg::token(cell);
}

Feature make_cell_feature(const dgg::CellId& cell) {
  Feature f;
  const std::string tok = dgg::token(cell);
  f.iri = mint_iri(MintKind::Cell, tok);
  f.key = cell_key(cell);
  f.kind = FeatureKind::Cell;
  f.class_iri = vocab::s2_cell_class();
  f.geometry = dgg::cell_geometry(cell);
  f.label = "S2 cell " + tok;
  return f;
}

// ------------------------------------------------------------ vocabulary

namespace vocab {
std::string rdf_type() { return rdf::iri(rdf::ns::rdf, "type"); }
std::string rdfs_label() { return rdf::iri(rdf::ns::rdfs, "label"); }
std::string rdfs_subclass_of() { return rdf::iri(rdf::ns::rdfs, "subClassOf"); }
std::string has_geometry() { return geo("hasGeometry"); }
std::string as_wkt() { return geo("asWKT"); }
std::string wkt_literal() { return geo("wktLiteral"); }
std::string has_temporal_scope() { return kont("hasTemporalScope"); }
std::string fof() { return sosa("hasFeatureOfInterest"); }
std::string is_fof() { return sosa("isFeatureOfInterestOf"); }
std::string observed_property() { return sosa("observedProperty"); }
std::string has_simple_result() { return sosa("hasSimpleResult"); }
std::string has_result() { return sosa("hasResult"); }
std::string phenomenon_time() { return sosa("phenomenonTime"); }
std::string result_time() { return sosa("resultTime"); }
std::string numeric_value() { return rdf::iri(rdf::ns::qudt_unit, "numericValue"); }
std::string unit() { return rdf::iri(rdf::ns::qudt_unit, "unit"); }
std::string from_dataset() { return kont("fromDataset"); }
std::string source_organization() { return kont("sourceOrganization"); }
std::string has_member() { return sosa("hasMember"); }
std::string in_xsd_datetime() { return otime("inXSDDateTime"); }
std::string has_beginning() { return otime("hasBeginning"); }
std::string has_end() { return otime("hasEnd"); }
std::string s2_cell_class() { return kont("S2Cell"); }
std::string sf(SpatialPredicate p) { return kont(predicate_name(p)); }
std::string geo_sf(SpatialPredicate p) { return geo(predicate_name(p)); }
}  // namespace vocab

// ------------------------------------------------------------ emission

namespace {

void emit_instant(std::vector<Triple>& out, const std::string& node, const DateTime& at) {
  out.push_back(tri(node, vocab::rdf_type(), otime("Instant")));
  out.push_back(lit(node, vocab::in_xsd_datetime(), at.lexical, xsd("dateTime")));
}

}  // namespace

std::vector<Triple> emit_temporal(const std::string& node, const TemporalEntity& t) {
  std::vector<Triple> out;
  if (const auto* i = std::get_if<Instant>(&t)) {
    emit_instant(out, node, i->at);
    return out;
  }
  const auto& iv = std::get<Interval>(t);
  const std::string begin = node + ".begin", end = node + ".end";
  out.push_back(tri(node, vocab::rdf_type(), otime("Interval")));
  out.push_back(tri(node, vocab::has_beginning(), begin));
  out.push_back(tri(node, vocab::has_end(), end));
  emit_instant(out, begin, iv.begin);
  emit_instant(out, end, iv.end);
  return out;
}

std::size_t temporal_triple_count(const TemporalEntity& t) { return std::holds_alternative<Instant>(t) ? 2 : 7; }

std::vector<Triple> emit_feature(const Feature& f) {
  if (f.kind == FeatureKind::Cell && !f.geometry) {
    throw Error(ErrorKind::InvalidArgument, "cell feature without geometry: " + f.iri);
  }
  std::vector<Triple> out;
  out.push_back(tri(f.iri, vocab::rdf_type(), f.class_iri.empty() ? kind_class(f.kind) : f.class_iri));
  out.push_back(lit(f.iri, vocab::rdfs_label(), f.label, xsd("string")));
  if (f.geometry) {
    const std::string g = mint_iri(MintKind::Geometry, f.key.empty() ? std::string(rdf::local_name(f.iri)) : f.key);
    out.push_back(tri(f.iri, vocab::has_geometry(), g));
    out.push_back(tri(g, vocab::rdf_type(), geo("Geometry")));
    out.push_back(lit(g, vocab::as_wkt(), serialize_wkt(*f.geometry), vocab::wkt_literal()));
  }
  if (f.temporal_scope) {
    const std::string node = mint_iri(MintKind::Time, (f.key.empty() ? std::string(rdf::local_name(f.iri)) : f.key) + ".scope");
    out.push_back(tri(f.iri, vocab::has_temporal_scope(), node));
    auto t = emit_temporal(node, *f.temporal_scope);
    out.insert(out.end(), t.begin(), t.end());
  }
  return out;
}

std::vector<Triple> emit_observation(const Observation& o, const EntityIndex& known) {
  if (!known.contains(o.feature_of_interest)) {
    throw Error(ErrorKind::Data, "dangling FOI <" + o.feature_of_interest + "> in observation <" + o.iri + ">");
  }
  if (!known.contains(o.observed_property)) {
    throw Error(ErrorKind::Data, "dangling property <" + o.observed_property + "> in observation <" + o.iri + ">");
  }
  std::vector<Triple> out;
  out.push_back(tri(o.iri, vocab::rdf_type(), o.class_iri.empty() ? sosa("Observation") : o.class_iri));
  out.push_back(tri(o.iri, vocab::fof(), o.feature_of_interest));
  out.push_back(tri(o.iri, vocab::observed_property(), o.observed_property));
  if (const auto* s = std::get_if<SimpleResult>(&o.result)) {
    out.push_back(lit(o.iri, vocab::has_simple_result(), s->lexical, s->datatype));
  } else {
    const auto& q = std::get<QuantityValue>(o.result);
    if (!std::isfinite(q.numeric_value)) {
      throw Error(ErrorKind::InvalidArgument, "non-finite quantity in observation <" + o.iri + ">");
    }
    const std::string r = o.iri + ".result";
    out.push_back(tri(o.iri, vocab::has_result(), r));
    out.push_back(tri(r, vocab::rdf_type(), kont("Quantity")));
    out.push_back(lit(r, vocab::numeric_value(), format_double(q.numeric_value), xsd("double")));
    out.push_back(tri(r, vocab::unit(), q.unit));
  }
  if (o.phenomenon_time) {
    const std::string node = o.iri + ".phenomenonTime";
    out.push_back(tri(o.iri, vocab::phenomenon_time(), node));
    auto t = emit_temporal(node, *o.phenomenon_time);
    out.insert(out.end(), t.begin(), t.end());
  }
  if (o.result_time) out.push_back(lit(o.iri, vocab::result_time(), o.result_time->lexical, xsd("dateTime")));
  if (o.sensor) out.push_back(tri(o.iri, sosa("madeBySensor"), *o.sensor));
  return out;
}

std::size_t observation_triple_count(const Observation& o) {
  std::size_t n = 3;
  n += std::holds_alternative<SimpleResult>(o.result) ? 1 : 4;
  if (o.phenomenon_time) n += 1 + temporal_triple_count(*o.phenomenon_time);
  if (o.result_time) ++n;
  if (o.sensor) ++n;
  return n;
}

Triple emit_foi_link(const Observation& o) { return tri(o.feature_of_interest, vocab::is_fof(), o.iri); }

std::vector<Triple> emit_property(const ObservableProperty& p) {
  std::vector<Triple> out;
  out.push_back(tri(p.iri, vocab::rdf_type(), sosa("ObservableProperty")));
  if (!p.label.empty()) out.push_back(lit(p.iri, vocab::rdfs_label(), p.label, xsd("string")));
  out.push_back(tri(p.iri, vocab::from_dataset(), p.dataset));
  return out;
}

std::vector<Triple> emit_dataset(const DatasetSubgraph& d) {
  std::vector<Triple> out;
  out.push_back(tri(d.iri, vocab::rdf_type(), kont("DatasetSubgraph")));
  out.push_back(lit(d.iri, kont("datasetId"), d.dataset_id, xsd("string")));
  out.push_back(lit(d.iri, vocab::rdfs_label(), d.title, xsd("string")));
  out.push_back(tri(d.iri, vocab::source_organization(), d.organization_iri));
  if (!d.license.empty()) out.push_back(lit(d.iri, kont("license"), d.license, xsd("string")));
  if (!d.creator.empty()) out.push_back(lit(d.iri, kont("creator"), d.creator, xsd("string")));
  if (!d.retrieval_date.empty()) out.push_back(lit(d.iri, kont("retrievalDate"), d.retrieval_date, xsd("date")));
  out.push_back(tri(d.organization_iri, vocab::rdf_type(), kont("Organization")));
  out.push_back(lit(d.organization_iri, vocab::rdfs_label(), d.organization, xsd("string")));
  return out;
}

std::vector<Triple> emit_theme(const ThematicSubgraph& t) {
  std::vector<Triple> out;
  out.push_back(tri(t.iri, vocab::rdf_type(), kont("ThematicSubgraph")));
  out.push_back(lit(t.iri, kont("theme"), t.theme, xsd("string")));
  for (const auto& d : t.datasets) out.push_back(tri(t.iri, kont("hasDatasetSubgraph"), d));
  return out;
}

std::vector<Triple> emit_collection(const ObservationCollection& c) {
  if (c.members.empty()) throw Error(ErrorKind::InvalidArgument, "empty observation collection " + c.iri);
  std::vector<Triple> out;
  out.push_back(tri(c.iri, vocab::rdf_type(), sosa("ObservationCollection")));
  out.push_back(tri(c.iri, vocab::observed_property(), c.observed_property));
  for (const auto& m : c.members) out.push_back(tri(c.iri, vocab::has_member(), m));
  return out;
}

std::vector<Triple> emit_feature_class(std::string_view class_iri, FeatureKind kind) {
  std::vector<Triple> out;
  const std::string k = kind_class(kind);
  if (class_iri != k) out.push_back(tri(std::string(class_iri), vocab::rdfs_subclass_of(), k));
  out.push_back(tri(k, vocab::rdfs_subclass_of(), geo("Feature")));
  out.push_back(tri(k, vocab::rdfs_subclass_of(), sosa("FeatureOfInterest")));
  return out;
}

std::vector<Triple> emit_observation_class(std::string_view class_iri) {
  if (class_iri == sosa("Observation")) return {};
  return {tri(std::string(class_iri), vocab::rdfs_subclass_of(), sosa("Observation"))};
}

std::vector<Triple> emit_spatial_relation(std::string_view a_view, SpatialPredicate p, std::string_view b_view,
                                          RelationScope scope) {
  if (p == SpatialPredicate::Disjoint) return {};
  const std::string a(a_view), b(b_view);
  SpatialPredicate back = p;
  if (p == SpatialPredicate::Within) back = SpatialPredicate::Contains;
  if (p == SpatialPredicate::Contains) back = SpatialPredicate::Within;
  std::vector<Triple> out{tri(a, vocab::sf(p), b), tri(b, vocab::sf(back), a)};
  if (scope == RelationScope::RegionRegion) {
    out.push_back(tri(a, vocab::geo_sf(p), b));
    out.push_back(tri(b, vocab::geo_sf(back), a));
  }
  return out;
}

}  // namespace kwg
