#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kwg/kgmodel.hpp"

namespace kwg::ingest {

// ------------------------------------------------------------ sources

/// Header plus rows of string cells; `geometries` is filled for GeoJSON
/// sources (one per row) and empty for CSV.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::optional<Geometry>> geometries;

  /// Index of a header column, or throws ErrorKind::Data.
  std::size_t column(const std::string& name) const;
};

/// RFC-4180 CSV with a header row. Quoted fields may hold separators,
/// doubled quotes and newlines. Throws ParseError.
Table parse_csv(std::string_view text);
/// FeatureCollection: properties become columns (union of keys, sorted),
/// values stringified; null or missing values are blank.
Table parse_geojson_features(std::string_view text);
Table read_table(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
nlohmann::json read_json(const std::filesystem::path& path);

// ------------------------------------------------------------ configuration

enum class ResultMode { Simple, Quantity };
enum class GeometryFormat { None, Wkt, GeoJson, Source };
enum class TimeTarget { Feature, Observation };

struct PropertyMapping {
  std::string column;
  std::string property;           // absolute IRI
  std::string label;
  std::string observation_class;  // absolute IRI
  ResultMode mode = ResultMode::Simple;
  std::string datatype;           // Simple mode, absolute IRI
  std::string unit;               // Quantity mode, absolute IRI
};

struct TimeMapping {
  TimeTarget target = TimeTarget::Feature;
  // Either per-row columns or constants; an interval has both ends.
  std::string instant_column, begin_column, end_column;
  std::string instant, begin, end;

  bool present() const;
};

struct MappingConfig {
  std::string dataset_id;
  FeatureKind foi_kind = FeatureKind::Region;
  std::string foi_class;
  std::string foi_key_column;
  std::string label_column;
  GeometryFormat geometry_format = GeometryFormat::None;
  std::string geometry_column;
  std::optional<TimeMapping> time;
  std::vector<PropertyMapping> properties;
  std::optional<int> integration_level;
};

struct DatasetManifest {
  std::string dataset_id;
  std::string title;
  std::string organization;
  std::string license;
  std::string creator;
  std::string retrieval_date;
};

/// Compact IRIs ("kwg-ont:x") are expanded against the namespace table.
/// Throws ErrorKind::Data on a malformed document.
MappingConfig parse_mapping(const nlohmann::json& j);
DatasetManifest parse_manifest(const nlohmann::json& j);

// ------------------------------------------------------------ entities

/// Everything one dataset contributes, before serialisation.
struct Entities {
  std::vector<Feature> features;
  std::vector<Observation> observations;
  std::vector<ObservableProperty> properties;
  std::vector<ObservationCollection> collections;
  std::vector<std::string> observation_classes;
  DatasetSubgraph dataset;

  /// Feature and property IRIs that observations may reference.
  EntityIndex known() const;
};

/// N rows and M mapped columns give N features and N*M minus blank cells
/// observations. Throws ErrorKind::Data for missing columns, duplicate keys
/// or unparseable values (row and column in the message).
Entities ingest_table(const Table& table, const MappingConfig& cfg, const DatasetManifest& manifest);

DatasetSubgraph make_dataset(const DatasetManifest& manifest);

/// Feature, observation, metadata and class triples. Each observation also
/// yields its FOI back-link.
std::vector<Triple> emit_entities(const Entities& e);

// ------------------------------------------------------------ spatial integration

struct IntegrationResult {
  std::vector<Triple> relations;
  std::vector<Feature> cells;         // every cell referenced, once, sorted by id
  std::vector<std::string> skipped;   // features that could not be integrated, with reasons
};

/// The strongest predicate that holds, checked in the order equals, within,
/// contains, overlaps, crosses, touches, intersects; Disjoint if none.
SpatialPredicate strongest_predicate(const DE9IM& m, int dim_a, int dim_b);

/// Cell relations for every feature with geometry at `level`, plus
/// feature-feature relations among areal features. Cell work fans out over
/// `threads` workers (0 = hardware concurrency).
IntegrationResult integrate_spatial(const std::vector<Feature>& features, int level, unsigned threads = 0);
/// Feature-feature part only.
std::vector<Triple> relate_areal_features(const std::vector<Feature>& features);
/// Cell part only.
IntegrationResult relate_to_cells(const std::vector<Feature>& features, int level, unsigned threads = 0);

/// Features with geometry recovered from a serialised graph (cells skipped).
/// Kind is taken from the class hierarchy triples.
std::vector<Feature> features_from_graph(const std::vector<Triple>& graph);

// ------------------------------------------------------------ rasters

enum class RasterKind { Continuous, Categorical };

struct RasterLayer {
  double west = 0, south = 0, east = 0, north = 0;
  int rows = 0, cols = 0;
  std::vector<double> values;  // row-major, north row first
  std::optional<double> nodata;
  RasterKind kind = RasterKind::Continuous;

  LatLng pixel_center(int row, int col) const;
  double at(int row, int col) const { return values[static_cast<std::size_t>(row) * cols + col]; }
};

/// ASCII grid: header lines "ncols", "nrows", "west", "south", "east",
/// "north", optional "nodata" and "kind", then rows*cols numbers.
RasterLayer parse_ascii_raster(std::string_view text);

struct RasterMapping {
  std::string dataset_id;
  std::string property;
  std::string label;
  std::string observation_class;
  std::string unit;  // empty: simple xsd:double / xsd:integer result
  std::optional<int> level;
  std::optional<TimeMapping> time;  // constants only
};

RasterMapping parse_raster_mapping(const nlohmann::json& j);

struct CellSummary {
  dgg::CellId cell;
  double value = 0;
  std::size_t pixels = 0;
};

/// Per-cell mean (continuous) or mode with ties to the smallest code
/// (categorical) of the pixels whose centers fall in each cell. Cells
/// without a valid pixel center are omitted. Throws InvalidArgument when
/// cells are smaller than pixels.
std::vector<CellSummary> summarize_raster(const RasterLayer& r, int level);

/// Cell features, observations and metadata for a summarised raster.
Entities raster_entities(const RasterLayer& r, int level, const RasterMapping& m, const DatasetManifest& manifest);

}  // namespace kwg::ingest
