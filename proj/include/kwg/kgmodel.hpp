#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <variant>
#include <vector>

#include "kwg/dgg.hpp"
#include "kwg/geometry.hpp"
#include "kwg/rdf.hpp"

namespace kwg {

using rdf::Term;
using rdf::Triple;

// ------------------------------------------------------------ time

/// xsd:dateTime with its instant on the UTC timeline.
struct DateTime {
  std::string lexical;  // normalised: always carries a zone designator
  double epoch_seconds = 0;

  friend bool operator==(const DateTime& a, const DateTime& b) { return a.lexical == b.lexical; }
};

/// Accepts "YYYY-MM-DD" (read as midnight UTC) or a full xsd:dateTime; a
/// missing zone is taken as UTC. Throws InvalidArgument.
DateTime parse_datetime(std::string_view text);

struct Instant {
  DateTime at;
};
struct Interval {
  DateTime begin;
  DateTime end;
};
using TemporalEntity = std::variant<Instant, Interval>;

Instant make_instant(std::string_view text);
/// Throws InvalidArgument when begin > end.
Interval make_interval(std::string_view begin, std::string_view end);
/// Closed interval overlap on the UTC timeline.
bool temporal_overlaps(const TemporalEntity& a, const TemporalEntity& b);

// ------------------------------------------------------------ entities

enum class FeatureKind { Hazard, Region, Cell };

std::string_view to_string(FeatureKind kind);
/// kwg-ont:Hazard, kwg-ont:Region or kwg-ont:Cell.
std::string kind_class(FeatureKind kind);

struct Feature {
  std::string iri;
  std::string key;  // source key the IRI was minted from
  FeatureKind kind = FeatureKind::Region;
  std::string class_iri;
  std::optional<Geometry> geometry;
  std::optional<TemporalEntity> temporal_scope;
  std::string label;
};

struct QuantityValue {
  double numeric_value = 0;
  std::string unit;
};

struct SimpleResult {
  std::string lexical;
  std::string datatype;
};

struct Observation {
  std::string iri;
  std::string key;
  std::string feature_of_interest;
  std::string observed_property;
  std::variant<SimpleResult, QuantityValue> result;
  std::optional<TemporalEntity> phenomenon_time;
  std::optional<DateTime> result_time;
  std::optional<std::string> sensor;
  std::string class_iri;
};

struct ObservationCollection {
  std::string iri;
  std::string observed_property;
  std::set<std::string> members;
};

struct ObservableProperty {
  std::string iri;
  std::string label;
  std::string dataset;
};

struct DatasetSubgraph {
  std::string iri;
  std::string dataset_id;
  std::string title;
  std::string organization;      // display name
  std::string organization_iri;
  std::string license;
  std::string creator;
  std::string retrieval_date;    // xsd:date lexical, may be empty
};

struct ThematicSubgraph {
  std::string iri;
  std::string theme;
  std::set<std::string> datasets;
};

// ------------------------------------------------------------ IRIs

enum class MintKind {
  Region,
  Hazard,
  Cell,
  Observation,
  Geometry,
  Time,
  Result,
  Dataset,
  Theme,
  Organization,
  Collection,
};

/// Deterministic resource IRI. Regions use the key verbatim; cells take a
/// token and become s2.level<L>.<token>; other kinds are prefixed with the
/// kind name. Bytes outside [A-Za-z0-9-._~] are percent-encoded.
std::string mint_iri(MintKind kind, std::string_view key);
std::string percent_encode(std::string_view text);
/// "<dataset>.<foi-key>.<property-local>", the observation mint key.
std::string observation_key(std::string_view dataset, std::string_view foi_key, std::string_view property_iri);
/// Lower-case, alphanumerics and '-' only.
std::string slug(std::string_view text);

std::string cell_key(const dgg::CellId& cell);
Feature make_cell_feature(const dgg::CellId& cell);

// ------------------------------------------------------------ emission

/// IRIs that observations may reference.
using EntityIndex = std::unordered_set<std::string>;

/// Type, label, geometry node (hasGeometry, node type, asWKT) and temporal
/// scope. A Cell yields exactly 5 triples.
std::vector<Triple> emit_feature(const Feature& f);
/// Type, FOI, property and result, plus optional times and sensor. Throws
/// ErrorKind::Data for a dangling FOI or property.
std::vector<Triple> emit_observation(const Observation& o, const EntityIndex& known);
/// foi sosa:isFeatureOfInterestOf obs.
Triple emit_foi_link(const Observation& o);
std::vector<Triple> emit_temporal(const std::string& node, const TemporalEntity& t);
std::vector<Triple> emit_property(const ObservableProperty& p);
std::vector<Triple> emit_dataset(const DatasetSubgraph& d);
std::vector<Triple> emit_theme(const ThematicSubgraph& t);
std::vector<Triple> emit_collection(const ObservationCollection& c);
/// rdfs:subClassOf links placing a feature class under its kind, and the
/// kind under geo:Feature and sosa:FeatureOfInterest.
std::vector<Triple> emit_feature_class(std::string_view class_iri, FeatureKind kind);
std::vector<Triple> emit_observation_class(std::string_view class_iri);

enum class RelationScope { CellFeature, RegionRegion };

/// kwg-ont:sf<Name> plus its converse (within/contains) or mirror
/// (symmetric predicates). Region pairs also get the geo: spellings.
/// Disjoint emits nothing.
std::vector<Triple> emit_spatial_relation(std::string_view a, SpatialPredicate p, std::string_view b,
                                          RelationScope scope = RelationScope::CellFeature);

/// Number of triples emit_observation produces for o.
std::size_t observation_triple_count(const Observation& o);
std::size_t temporal_triple_count(const TemporalEntity& t);

// Frequently used vocabulary.
namespace vocab {
std::string rdf_type();
std::string rdfs_label();
std::string rdfs_subclass_of();
std::string has_geometry();
std::string as_wkt();
std::string wkt_literal();
std::string has_temporal_scope();
std::string fof();             // sosa:hasFeatureOfInterest
std::string is_fof();          // sosa:isFeatureOfInterestOf
std::string observed_property();
std::string has_simple_result();
std::string has_result();
std::string phenomenon_time();
std::string result_time();
std::string numeric_value();
std::string unit();
std::string from_dataset();
std::string source_organization();
std::string has_member();
std::string in_xsd_datetime();
std::string has_beginning();
std::string has_end();
std::string s2_cell_class();
std::string sf(SpatialPredicate p);      // kwg-ont:sf<Name>
std::string geo_sf(SpatialPredicate p);  // geo:sf<Name>
}  // namespace vocab

}  // namespace kwg
