#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kwg::rdf {

// ------------------------------------------------------------ namespaces

namespace ns {
inline constexpr std::string_view kwg_ont = "http://stko-kwg.geog.ucsb.edu/lod/ontology/";
inline constexpr std::string_view kwgr = "http://stko-kwg.geog.ucsb.edu/lod/resource/";
inline constexpr std::string_view sosa = "http://www.w3.org/ns/sosa/";
inline constexpr std::string_view geo = "http://www.opengis.net/ont/geosparql#";
inline constexpr std::string_view rdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view rdfs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view xsd = "http://www.w3.org/2001/XMLSchema#";
inline constexpr std::string_view time = "http://www.w3.org/2006/time#";
inline constexpr std::string_view qudt_unit = "http://qudt.org/vocab/unit/";
}  // namespace ns

struct Prefix {
  std::string_view name;  // without the colon
  std::string_view iri;
};

/// The fixed prefix table, in serialisation order.
const std::vector<Prefix>& namespace_table();

/// Expands "prefix:local" against the table, or strips "<...>". Throws
/// ErrorKind::InvalidArgument for an unknown prefix.
std::string expand(std::string_view curie_or_iri);
/// "prefix:local" when the IRI falls under a table namespace and the local
/// part is a safe Turtle local name.
std::optional<std::string> compact(std::string_view iri);
/// Text after the last '/', '#' or ':'.
std::string_view local_name(std::string_view iri);
/// True for IRIs under one of the table namespaces.
bool in_namespace_table(std::string_view iri);

inline std::string iri(std::string_view base, std::string_view local) {
  std::string out(base);
  out.append(local);
  return out;
}

// ------------------------------------------------------------ terms

enum class TermKind : std::uint8_t { Iri, BlankNode, Literal };

class Term {
 public:
  Term() = default;
  static Term iri(std::string value);
  static Term blank(std::string label);
  /// Literal with an explicit datatype (xsd:string by default).
  static Term literal(std::string lexical, std::string datatype = std::string(ns::xsd) + "string");
  static Term typed(std::string lexical, std::string_view xsd_local) {
    return literal(std::move(lexical), std::string(ns::xsd) + std::string(xsd_local));
  }

  TermKind kind() const { return kind_; }
  bool is_iri() const { return kind_ == TermKind::Iri; }
  bool is_literal() const { return kind_ == TermKind::Literal; }
  bool is_blank() const { return kind_ == TermKind::BlankNode; }
  /// IRI string, blank node label or literal lexical form.
  const std::string& value() const { return value_; }
  const std::string& datatype() const { return datatype_; }

  /// Numeric value for xsd integer/decimal/double/float literals.
  std::optional<double> numeric() const;
  /// N-Triples form: <iri>, _:label or "lexical"^^<datatype>.
  std::string ntriples() const;

  friend bool operator==(const Term&, const Term&) = default;
  friend auto operator<=>(const Term&, const Term&) = default;

 private:
  Term(TermKind kind, std::string value, std::string datatype)
      : kind_(kind), value_(std::move(value)), datatype_(std::move(datatype)) {}

  TermKind kind_ = TermKind::Iri;
  std::string value_;
  std::string datatype_;
};

struct TermHash {
  std::size_t operator()(const Term& t) const noexcept {
    return std::hash<std::string>()(t.value()) ^ (std::hash<std::string>()(t.datatype()) * 31u) ^
           static_cast<std::size_t>(t.kind());
  }
};

struct Triple {
  Term subject;
  Term predicate;
  Term object;

  friend bool operator==(const Triple&, const Triple&) = default;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

// ------------------------------------------------------------ serialisation

/// One statement per line, sorted by the serialised (S, P, O) strings,
/// duplicates removed.
std::string serialize_ntriples(std::vector<Triple> triples);
/// Turtle using the fixed prefix table, subjects grouped, deterministic.
std::string serialize_turtle(std::vector<Triple> triples);
/// Parses N-Triples (comments and blank lines allowed). Throws ParseError.
std::vector<Triple> parse_ntriples(std::string_view text);

std::string escape_literal(std::string_view lexical);

}  // namespace kwg::rdf
