#include <doctest.h>

#include <random>

#include "kwg/store.hpp"

using namespace kwg;

namespace {

std::vector<Triple> random_graph(std::mt19937& rng, int n, int vocab) {
  std::uniform_int_distribution<int> pick(0, vocab - 1);
  std::vector<Triple> out;
  for (int i = 0; i < n; ++i) {
    Term o = (i % 3 == 0) ? Term::typed(std::to_string(pick(rng)), "integer")
                          : Term::iri("http://t/n" + std::to_string(pick(rng)));
    out.push_back({Term::iri("http://t/n" + std::to_string(pick(rng))),
                   Term::iri("http://t/p" + std::to_string(pick(rng) % 5)), o});
  }
  return out;
}

}  // namespace

TEST_CASE("set semantics") {
  TripleStore st;
  CHECK(st.size() == 0);
  CHECK(st.bulk_load({}) == 0);
  const Triple t{Term::iri("http://a"), Term::iri("http://p"), Term::literal("x")};
  CHECK(st.insert(t));
  CHECK_FALSE(st.insert(t));
  CHECK(st.size() == 1);
  CHECK(st.match(t.subject, t.predicate, t.object).size() == 1);
  CHECK(st.match(t.subject, t.predicate, Term::literal("y")).empty());
  CHECK(st.erase(t));
  CHECK_FALSE(st.erase(t));
  CHECK(st.size() == 0);
  CHECK(st.indexes_coherent());
}

TEST_CASE("match equals a scan filter on 1000 random patterns") {
  std::mt19937 rng(11);
  auto graph = random_graph(rng, 3000, 60);
  TripleStore st;
  st.bulk_load(std::vector<Triple>(graph.begin(), graph.begin() + 2000));
  for (std::size_t i = 2000; i < graph.size(); ++i) st.insert(graph[i]);
  std::sort(graph.begin(), graph.end());
  graph.erase(std::unique(graph.begin(), graph.end()), graph.end());
  REQUIRE(st.size() == graph.size());
  REQUIRE(st.indexes_coherent());

  std::uniform_int_distribution<std::size_t> which(0, graph.size() - 1);
  std::uniform_int_distribution<int> coin(0, 1);
  int failures = 0;
  for (int k = 0; k < 1000; ++k) {
    const Triple& seed = graph[which(rng)];
    std::optional<Term> s, p, o;
    if (coin(rng)) s = seed.subject;
    if (coin(rng)) p = seed.predicate;
    if (coin(rng)) o = seed.object;
    if (k % 10 == 0) s = Term::iri("http://t/absent");
    std::vector<Triple> expect;
    for (const auto& t : graph) {
      if ((!s || t.subject == *s) && (!p || t.predicate == *p) && (!o || t.object == *o)) expect.push_back(t);
    }
    auto got = st.match(s, p, o);
    std::sort(got.begin(), got.end());
    failures += got != expect;
  }
  CHECK(failures == 0);
}

TEST_CASE("n-triples file round trip") {
  std::mt19937 rng(5);
  const auto graph = random_graph(rng, 200, 20);
  TripleStore a;
  a.bulk_load(graph);
  const auto path = std::filesystem::temp_directory_path() / "kwg_store_test.nt";
  a.save_ntriples_file(path);
  TripleStore b;
  CHECK(b.load_ntriples_file(path) == a.size());
  CHECK(b.triples().size() == a.size());
  for (const auto& t : a.triples()) CHECK(b.contains(t));
  std::filesystem::remove(path);
}
