#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kwg/ingest.hpp"

namespace kwg::pipeline {

struct DatasetEntry {
  std::filesystem::path mapping;
  std::filesystem::path manifest;
  std::filesystem::path source;
  bool raster = false;
};

struct ThemeEntry {
  std::string theme;
  std::vector<std::string> datasets;  // dataset ids
};

/// A run document: datasets with their mapping and manifest, themes, the
/// default integration level and optional shapes/graph paths. Relative
/// paths resolve against the document's directory.
struct RunConfig {
  std::filesystem::path base;
  int level = 13;
  std::optional<int> level_override;  // beats per-mapping levels when set
  std::vector<DatasetEntry> datasets;
  std::vector<ThemeEntry> themes;
  std::filesystem::path shapes;
  std::filesystem::path graph;
  int port = 8080;
};

/// Throws ErrorKind::NotFound for a missing file and ErrorKind::Data for a
/// malformed document.
RunConfig load_run_config(const std::filesystem::path& path);

struct IngestOutput {
  std::vector<ingest::Entities> datasets;
  std::vector<Triple> triples;  // entities, metadata and themes; no spatial relations
};

IngestOutput ingest_run(const RunConfig& cfg);

/// Cell and feature-feature relations plus cell features.
std::vector<Triple> relate_entities(const RunConfig& cfg, const IngestOutput& ingested,
                                    std::vector<std::string>* skipped = nullptr);
/// Same, for features recovered from a graph at a single level.
std::vector<Triple> relate_graph(const std::vector<Triple>& graph, int level,
                                 std::vector<std::string>* skipped = nullptr);

/// Ingest plus relate, sorted and without duplicates.
std::vector<Triple> build_graph(const RunConfig& cfg, std::vector<std::string>* skipped = nullptr);

/// Sorted, duplicate-free union.
std::vector<Triple> merge(std::vector<Triple> a, const std::vector<Triple>& b);

}  // namespace kwg::pipeline
