#pragma once

#include <memory>
#include <string>

#include "kwg/dgg.hpp"
#include "kwg/pipeline.hpp"
#include "kwg/store.hpp"

namespace kwg::testing {

inline std::string data_path(const std::string& rel) { return std::string(KWG_DATA_DIR) + "/" + rel; }

/// The Louisiana fixture graph, built once per process.
inline std::shared_ptr<const TripleStore> fixture_store() {
  static const std::shared_ptr<const TripleStore> store = [] {
    auto cfg = pipeline::load_run_config(data_path("louisiana/run.json"));
    auto st = std::make_shared<TripleStore>();
    st->bulk_load(pipeline::build_graph(cfg));
    return std::shared_ptr<const TripleStore>(st);
  }();
  return store;
}

/// Level-13 cell inside county A.
inline dgg::CellId county_a_cell() { return dgg::cell_from_point({30.45, -91.15}, 13); }

inline constexpr const char* kCountyA = "Earth.NA.US.USA.19.17_1";
inline constexpr const char* kCountyB = "Earth.NA.US.USA.19.33_1";
inline constexpr const char* kState = "Earth.NA.US.USA.19_1";

}  // namespace kwg::testing
