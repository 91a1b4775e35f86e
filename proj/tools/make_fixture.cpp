// Writes the Louisiana-style acceptance fixture. Counties and the state are
// exact unions of level-13 cells so spatial relations are known by
// construction: county A holds 3 cells, county B 2, county C lies outside
// the state. `--check DIR` compares instead of writing.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kwg/dgg.hpp"
#include "kwg/ingest.hpp"

namespace {

using kwg::dgg::CellId;
using nlohmann::json;
using Files = std::map<std::string, std::string>;

constexpr int kLevel = 13;

std::string wkt_of(const std::vector<CellId>& cells) { return kwg::serialize_wkt(kwg::dgg::union_of_cells(cells)); }

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

Files build() {
  const CellId anchor = kwg::dgg::cell_from_point({30.45, -91.15}, kLevel);
  const int face = anchor.face();
  const auto i0 = anchor.i(), j0 = anchor.j();
  auto cell = [&](int di, int dj) { return CellId::from_face_ij(face, kLevel, i0 + di, j0 + dj); };

  std::vector<CellId> state, county_a{cell(0, 0), cell(1, 0), cell(0, 1)}, county_b{cell(2, 1), cell(3, 1)},
      county_c{cell(8, 0), cell(9, 0)};
  for (int di = -1; di <= 4; ++di) {
    for (int dj = -1; dj <= 2; ++dj) state.push_back(cell(di, dj));
  }

  Files f;
  f["admin.csv"] = "region_key,name,wkt\nEarth.NA.US.USA.19_1,Louisiana," + csv_quote(wkt_of(state)) + "\n";
  f["svi.csv"] = "county_key,name,wkt,svi_score,population\n"
                 "Earth.NA.US.USA.19.17_1,County A," + csv_quote(wkt_of(county_a)) + ",0.8123,456781\n"
                 "Earth.NA.US.USA.19.33_1,County B," + csv_quote(wkt_of(county_b)) + ",0.4410,129204\n"
                 "Earth.NA.US.USA.25.4_1,County C," + csv_quote(wkt_of(county_c)) + ",0.2975,\n";

  // Hurricane track through the counties and an areal impact extent around it.
  const auto centre = kwg::dgg::cell_polygon(cell(1, 1)).vertices[0];
  auto pt = [&](double dlat, double dlng) {
    return fixed(centre.lng + dlng, 4) + " " + fixed(centre.lat + dlat, 4);
  };
  const std::string track = "LINESTRING (" + pt(-0.0731, -0.1187) + ", " + pt(-0.0113, -0.0052) + ", " +
                            pt(0.0694, 0.0828) + ")";
  const std::string impact = "POLYGON ((" + pt(-0.0412, -0.0523) + ", " + pt(-0.0388, 0.0371) + ", " +
                             pt(0.0357, 0.0406) + ", " + pt(0.0331, -0.0497) + ", " + pt(-0.0412, -0.0523) + "))";
  f["hurricanes.csv"] = "hazard_key,name,wkt,begin,end,max_wind_kmh\n"
                        "Ida.2021.track,Hurricane Ida track," + csv_quote(track) +
                        ",2021-08-26T12:00:00Z,2021-09-04T18:00:00Z,240\n"
                        "Ida.2021.impact,Hurricane Ida impact area," + csv_quote(impact) +
                        ",2021-08-29T00:00:00Z,2021-08-31T00:00:00Z,\n";

  // Temperature grid covering the state with margin.
  const auto sbox = kwg::dgg::union_of_cells(state).bbox();
  const double west = std::floor((sbox.west - 0.05) * 100) / 100, east = std::ceil((sbox.east + 0.05) * 100) / 100;
  const double south = std::floor((sbox.south - 0.05) * 100) / 100, north = std::ceil((sbox.north + 0.05) * 100) / 100;
  std::ostringstream asc;
  asc << "ncols 24\nnrows 24\nwest " << fixed(west, 2) << "\nsouth " << fixed(south, 2) << "\neast " << fixed(east, 2)
      << "\nnorth " << fixed(north, 2) << "\nnodata -9999\nkind continuous\n";
  for (int r = 0; r < 24; ++r) {
    for (int c = 0; c < 24; ++c) {
      asc << (c ? " " : "") << ((r == 23 && c == 23) ? std::string("-9999") : fixed(26.0 + 0.1 * ((r * 7 + c * 3) % 23), 1));
    }
    asc << "\n";
  }
  f["temperature.asc"] = asc.str();

  f["admin.mapping.json"] = dump({{"dataset_id", "admin"},
                                  {"feature",
                                   {{"kind", "Region"},
                                    {"class", "kwg-ont:AdminRegion_1"},
                                    {"key_column", "region_key"},
                                    {"label_column", "name"},
                                    {"geometry", {{"column", "wkt"}, {"format", "wkt"}}}}},
                                  {"properties", json::array()}});
  f["svi.mapping.json"] = dump(
      {{"dataset_id", "svi"},
       {"feature",
        {{"kind", "Region"},
         {"class", "kwg-ont:AdminRegion_3"},
         {"key_column", "county_key"},
         {"label_column", "name"},
         {"geometry", {{"column", "wkt"}, {"format", "wkt"}}}}},
       {"time", {{"target", "observation"}, {"instant", "2018-01-01"}}},
       {"properties",
        {{{"column", "svi_score"},
          {"property", "kwg-ont:socialVulnerabilityIndex"},
          {"label", "Social Vulnerability Index"},
          {"observation_class", "kwg-ont:VulnerabilityObservation"},
          {"result", "simple"},
          {"datatype", "xsd:decimal"}},
         {{"column", "population"},
          {"property", "kwg-ont:totalPopulation"},
          {"label", "Total population"},
          {"observation_class", "kwg-ont:PopulationObservation"},
          {"result", "simple"},
          {"datatype", "xsd:integer"}}}},
       {"integration_level", kLevel}});
  f["hurricanes.mapping.json"] = dump({{"dataset_id", "hurricanes"},
                                       {"feature",
                                        {{"kind", "Hazard"},
                                         {"class", "kwg-ont:Hurricane"},
                                         {"key_column", "hazard_key"},
                                         {"label_column", "name"},
                                         {"geometry", {{"column", "wkt"}, {"format", "wkt"}}}}},
                                       {"time", {{"target", "feature"}, {"begin_column", "begin"}, {"end_column", "end"}}},
                                       {"properties",
                                        {{{"column", "max_wind_kmh"},
                                          {"property", "kwg-ont:maximumSustainedWind"},
                                          {"label", "Maximum sustained wind"},
                                          {"observation_class", "kwg-ont:HazardObservation"},
                                          {"result", "quantity"},
                                          {"unit", "qudt-unit:KiloM-PER-HR"}}}},
                                       {"integration_level", kLevel}});
  f["temperature.mapping.json"] = dump({{"dataset_id", "temperature"},
                                        {"property", "kwg-ont:airTemperature"},
                                        {"label", "Mean air temperature"},
                                        {"observation_class", "kwg-ont:TemperatureObservation"},
                                        {"unit", "qudt-unit:DEG_C"},
                                        {"level", 11},
                                        {"time", {{"instant", "2021-08-29"}}}});

  auto manifest = [](const char* id, const char* title, const char* org, const char* license) {
    return dump({{"dataset_id", id},
                 {"title", title},
                 {"organization", org},
                 {"license", license},
                 {"creator", "kwg fixture generator"},
                 {"retrieval_date", "2024-01-15"}});
  };
  f["admin.manifest.json"] = manifest("admin", "Administrative boundaries (synthetic)", "GADM", "CC-BY-4.0");
  f["svi.manifest.json"] = manifest("svi", "Social Vulnerability Index (synthetic)",
                                    "Centers for Disease Control and Prevention", "public domain");
  f["hurricanes.manifest.json"] =
      manifest("hurricanes", "Hurricane tracks and impacts (synthetic)", "National Hurricane Center", "public domain");
  f["temperature.manifest.json"] =
      manifest("temperature", "Gridded air temperature (synthetic)", "PRISM Climate Group", "CC-BY-4.0");

  auto entry = [](const char* name, const char* source) {
    return json{{"mapping", std::string(name) + ".mapping.json"},
                {"manifest", std::string(name) + ".manifest.json"},
                {"source", source}};
  };
  f["run.json"] = dump({{"level", kLevel},
                        {"datasets", {entry("admin", "admin.csv"), entry("svi", "svi.csv"),
                                      entry("hurricanes", "hurricanes.csv")}},
                        {"rasters", {entry("temperature", "temperature.asc")}},
                        {"themes",
                         {{{"theme", "administrative units"}, {"datasets", {"admin"}}},
                          {{"theme", "social vulnerability"}, {"datasets", {"svi"}}},
                          {{"theme", "natural hazards"}, {"datasets", {"hurricanes"}}},
                          {{"theme", "climate"}, {"datasets", {"temperature"}}}}},
                        {"shapes", "../shapes.json"},
                        {"port", 8080}});
  return f;
}

}  // namespace

int main(int argc, char** argv) {
  const bool check = argc == 3 && std::string(argv[1]) == "--check";
  if (!(argc == 2 || check)) {
    std::cerr << "usage: make_fixture OUT_DIR | --check DIR\n";
    return 1;
  }
  const std::filesystem::path dir = argv[argc - 1];
  const Files files = build();
  int stale = 0;
  for (const auto& [name, content] : files) {
    const auto path = dir / name;
    if (check) {
      std::string current;
      try {
        current = kwg::ingest::read_file(path);
      } catch (const std::exception&) {
      }
      if (current != content) {
        std::cerr << "stale: " << path.string() << "\n";
        ++stale;
      }
    } else {
      std::filesystem::create_directories(dir);
      std::ofstream(path, std::ios::binary) << content;
    }
  }
  if (check) std::cout << (stale ? "fixture is stale\n" : "fixture is current\n");
  return stale ? 2 : 0;
}
