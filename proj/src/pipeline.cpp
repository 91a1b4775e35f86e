#include "kwg/pipeline.hpp"

#include <algorithm>
#include <map>

#include "kwg/error.hpp"

namespace kwg::pipeline {

using nlohmann::json;

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) throw Error(ErrorKind::Data, std::string("run: missing path '") + key + "'");
  std::filesystem::path p = j[key].get<std::string>();
  return p.is_absolute() ? p : base / p;
}

void add_all(std::vector<Triple>& out, const std::vector<Triple>& ts) { out.insert(out.end(), ts.begin(), ts.end()); }

}  // namespace

RunConfig load_run_config(const std::filesystem::path& path) {
  const json j = ingest::read_json(path);
  if (!j.is_object()) throw Error(ErrorKind::Data, "run document must be an object");
  RunConfig c;
  c.base = path.parent_path();
  if (j.contains("level")) {
    if (!j["level"].is_number_integer()) throw Error(ErrorKind::Data, "run: 'level' must be an integer");
    c.level = j["level"].get<int>();
  }
  if (c.level < 0 || c.level > dgg::kMaxLevel) throw Error(ErrorKind::Data, "run: level out of range");
  if (j.contains("port")) c.port = j["port"].get<int>();
  if (j.contains("shapes")) c.shapes = resolve(c.base, j, "shapes");
  if (j.contains("graph")) c.graph = resolve(c.base, j, "graph");
  for (const char* section : {"datasets", "rasters"}) {
    if (!j.contains(section)) continue;
    if (!j[section].is_array()) throw Error(ErrorKind::Data, std::string("run: '") + section + "' must be an array");
    for (const auto& d : j[section]) {
      DatasetEntry e{resolve(c.base, d, "mapping"), resolve(c.base, d, "manifest"), resolve(c.base, d, "source"),
                     std::string(section) == "rasters"};
      c.datasets.push_back(std::move(e));
    }
  }
  if (j.contains("themes")) {
    for (const auto& t : j["themes"]) {
      ThemeEntry e;
      e.theme = t.at("theme").get<std::string>();
      e.datasets = t.at("datasets").get<std::vector<std::string>>();
      c.themes.push_back(std::move(e));
    }
  }
  return c;
}

IngestOutput ingest_run(const RunConfig& cfg) {
  IngestOutput out;
  std::map<std::string, std::string> dataset_iris;
  for (const auto& d : cfg.datasets) {
    const auto manifest = ingest::parse_manifest(ingest::read_json(d.manifest));
    if (dataset_iris.contains(manifest.dataset_id)) {
      throw Error(ErrorKind::Data, "dataset '" + manifest.dataset_id + "' listed twice");
    }
    ingest::Entities e;
    if (d.raster) {
      const auto m = ingest::parse_raster_mapping(ingest::read_json(d.mapping));
      ingest::RasterLayer layer;
      try {
        layer = ingest::parse_ascii_raster(ingest::read_file(d.source));
      } catch (const ParseError& err) {
        throw Error(ErrorKind::Data, d.source.string() + ": " + err.what());
      }
      e = ingest::raster_entities(layer, cfg.level_override.value_or(m.level.value_or(cfg.level)), m, manifest);
    } else {
      const auto m = ingest::parse_mapping(ingest::read_json(d.mapping));
      e = ingest::ingest_table(ingest::read_table(d.source), m, manifest);
    }
    dataset_iris[manifest.dataset_id] = e.dataset.iri;
    add_all(out.triples, ingest::emit_entities(e));
    out.datasets.push_back(std::move(e));
  }
  for (const auto& t : cfg.themes) {
    ThematicSubgraph th{mint_iri(MintKind::Theme, slug(t.theme)), t.theme, {}};
    for (const auto& id : t.datasets) {
      auto it = dataset_iris.find(id);
      if (it == dataset_iris.end()) throw Error(ErrorKind::Data, "theme '" + t.theme + "' names unknown dataset '" + id + "'");
      th.datasets.insert(it->second);
    }
    add_all(out.triples, emit_theme(th));
  }
  return out;
}

namespace {

std::vector<Triple> cell_triples(const ingest::IntegrationResult& r, std::vector<std::string>* skipped) {
  std::vector<Triple> out = r.relations;
  for (const auto& c : r.cells) add_all(out, emit_feature(c));
  if (!r.cells.empty()) add_all(out, emit_feature_class(vocab::s2_cell_class(), FeatureKind::Cell));
  if (skipped) skipped->insert(skipped->end(), r.skipped.begin(), r.skipped.end());
  return out;
}

}  // namespace

std::vector<Triple> relate_entities(const RunConfig& cfg, const IngestOutput& ingested,
                                    std::vector<std::string>* skipped) {
  std::map<int, std::vector<Feature>> by_level;
  std::vector<Feature> all;
  for (std::size_t i = 0; i < ingested.datasets.size(); ++i) {
    const auto& e = ingested.datasets[i];
    int level = cfg.level;
    if (cfg.level_override) {
      level = *cfg.level_override;
    } else if (!cfg.datasets[i].raster) {
      level = ingest::parse_mapping(ingest::read_json(cfg.datasets[i].mapping)).integration_level.value_or(cfg.level);
    }
    for (const auto& f : e.features) {
      if (f.kind == FeatureKind::Cell || !f.geometry) continue;
      by_level[level].push_back(f);
      all.push_back(f);
    }
  }
  std::vector<Triple> out;
  for (const auto& [level, fs] : by_level) add_all(out, cell_triples(ingest::relate_to_cells(fs, level), skipped));
  add_all(out, ingest::relate_areal_features(all));
  return out;
}

std::vector<Triple> relate_graph(const std::vector<Triple>& graph, int level, std::vector<std::string>* skipped) {
  const auto features = ingest::features_from_graph(graph);
  auto out = cell_triples(ingest::relate_to_cells(features, level), skipped);
  add_all(out, ingest::relate_areal_features(features));
  return out;
}

std::vector<Triple> merge(std::vector<Triple> a, const std::vector<Triple>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

std::vector<Triple> build_graph(const RunConfig& cfg, std::vector<std::string>* skipped) {
  const auto ingested = ingest_run(cfg);
  return merge(ingested.triples, relate_entities(cfg, ingested, skipped));
}

}  // namespace kwg::pipeline
