#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "kwg/error.hpp"
#include "kwg/ingest.hpp"

namespace kwg::ingest {

SpatialPredicate strongest_predicate(const DE9IM& m, int dim_a, int dim_b) {
  static constexpr SpatialPredicate kOrder[] = {
      SpatialPredicate::Equals,   SpatialPredicate::Within,  SpatialPredicate::Contains, SpatialPredicate::Overlaps,
      SpatialPredicate::Crosses,  SpatialPredicate::Touches, SpatialPredicate::Intersects,
  };
  for (SpatialPredicate p : kOrder) {
    if (holds(m, p, dim_a, dim_b)) return p;
  }
  return SpatialPredicate::Disjoint;
}

namespace {

struct FeatureWork {
  std::vector<Triple> relations;
  std::vector<dgg::CellId> cells;
  std::string skipped;
};

FeatureWork relate_one(const Feature& f, int level) {
  FeatureWork w;
  std::vector<dgg::CellId> cover;
  try {
    cover = dgg::cover_geometry(*f.geometry, level);
  } catch (const Error& e) {
    w.skipped = "<" + f.iri + ">: " + e.what();
    return w;
  }
  const std::string firi = f.iri;
  for (const auto& c : cover) {
    const Geometry cg = dgg::cell_geometry(c);
    const SpatialPredicate p = strongest_predicate(relate(cg, *f.geometry), 2, f.geometry->dimension());
    if (p == SpatialPredicate::Disjoint) continue;  // footprint only grazed by the cover's tolerance
    const std::string ciri = mint_iri(MintKind::Cell, dgg::token(c));
    auto ts = emit_spatial_relation(ciri, p, firi);
    w.relations.insert(w.relations.end(), ts.begin(), ts.end());
    w.cells.push_back(c);
  }
  return w;
}

}  // namespace

IntegrationResult relate_to_cells(const std::vector<Feature>& features, int level, unsigned threads) {
  if (level < 0 || level > dgg::kMaxLevel) throw Error(ErrorKind::InvalidArgument, "integration level out of range");
  std::vector<const Feature*> todo;
  for (const auto& f : features) {
    if (f.geometry && f.kind != FeatureKind::Cell) todo.push_back(&f);
  }
  std::vector<FeatureWork> results(todo.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, std::max<std::size_t>(1, todo.size()));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < todo.size();) {
      try {
        results[i] = relate_one(*todo[i], level);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  IntegrationResult out;
  std::set<dgg::CellId> cells;
  for (auto& r : results) {
    out.relations.insert(out.relations.end(), r.relations.begin(), r.relations.end());
    cells.insert(r.cells.begin(), r.cells.end());
    if (!r.skipped.empty()) out.skipped.push_back(std::move(r.skipped));
  }
  for (const auto& c : cells) out.cells.push_back(make_cell_feature(c));
  return out;
}

std::vector<Triple> relate_areal_features(const std::vector<Feature>& features) {
  std::vector<const Feature*> areal;
  for (const auto& f : features) {
    if (f.geometry && f.geometry->is_areal() && f.kind != FeatureKind::Cell) areal.push_back(&f);
  }
  std::sort(areal.begin(), areal.end(), [](const Feature* a, const Feature* b) { return a->iri < b->iri; });
  std::vector<Triple> out;
  for (std::size_t i = 0; i < areal.size(); ++i) {
    for (std::size_t j = i + 1; j < areal.size(); ++j) {
      const Feature& a = *areal[i];
      const Feature& b = *areal[j];
      if (a.iri == b.iri || !a.geometry->bbox().intersects(b.geometry->bbox(), kTopologyEpsilon)) continue;
      const SpatialPredicate p = strongest_predicate(relate(*a.geometry, *b.geometry), 2, 2);
      if (p == SpatialPredicate::Disjoint) continue;
      const RelationScope scope = a.kind == FeatureKind::Region && b.kind == FeatureKind::Region
                                      ? RelationScope::RegionRegion
                                      : RelationScope::CellFeature;
      auto ts = emit_spatial_relation(a.iri, p, b.iri, scope);
      out.insert(out.end(), ts.begin(), ts.end());
    }
  }
  return out;
}

IntegrationResult integrate_spatial(const std::vector<Feature>& features, int level, unsigned threads) {
  IntegrationResult out = relate_to_cells(features, level, threads);
  auto rr = relate_areal_features(features);
  out.relations.insert(out.relations.end(), rr.begin(), rr.end());
  return out;
}

std::vector<Feature> features_from_graph(const std::vector<Triple>& graph) {
  const std::string type = vocab::rdf_type(), sub = vocab::rdfs_subclass_of(), hasg = vocab::has_geometry(),
                    wkt = vocab::as_wkt(), label = vocab::rdfs_label();
  std::map<std::string, FeatureKind> kind_of_class;
  for (FeatureKind k : {FeatureKind::Hazard, FeatureKind::Region, FeatureKind::Cell}) kind_of_class[kind_class(k)] = k;
  kind_of_class[vocab::s2_cell_class()] = FeatureKind::Cell;
  for (const auto& t : graph) {
    if (t.predicate.value() != sub) continue;
    if (auto it = kind_of_class.find(t.object.value()); it != kind_of_class.end()) {
      kind_of_class.emplace(t.subject.value(), it->second);
    }
  }
  std::map<std::string, std::string> wkt_of, geometry_of, class_of, label_of;
  for (const auto& t : graph) {
    const std::string& p = t.predicate.value();
    if (p == wkt) wkt_of[t.subject.value()] = t.object.value();
    if (p == hasg) geometry_of[t.subject.value()] = t.object.value();
    if (p == type && kind_of_class.contains(t.object.value())) class_of[t.subject.value()] = t.object.value();
    if (p == label) label_of[t.subject.value()] = t.object.value();
  }
  std::vector<Feature> out;
  for (const auto& [iri, g] : geometry_of) {
    auto c = class_of.find(iri);
    auto w = wkt_of.find(g);
    if (c == class_of.end() || w == wkt_of.end()) continue;
    const FeatureKind kind = kind_of_class.at(c->second);
    if (kind == FeatureKind::Cell) continue;
    Feature f;
    f.iri = iri;
    f.kind = kind;
    f.class_iri = c->second;
    f.label = label_of.contains(iri) ? label_of.at(iri) : std::string();
    try {
      f.geometry = parse_wkt(w->second);
    } catch (const Error& e) {
      throw Error(ErrorKind::Data, "<" + iri + ">: " + e.what());
    }
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace kwg::ingest
