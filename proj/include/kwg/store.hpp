#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <optional>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

#include "kwg/rdf.hpp"

namespace kwg {

using rdf::Term;
using rdf::Triple;

using TermId = std::uint32_t;
using IdTriple = std::array<TermId, 3>;  // always (s, p, o)

struct IdPattern {
  std::optional<TermId> s, p, o;
};

/// In-memory triple set with dense term ids and SPO/POS/OSP orderings.
/// Readers take a shared lock per call; writers are exclusive.
class TripleStore {
 public:
  TripleStore() = default;
  TripleStore(const TripleStore&) = delete;
  TripleStore& operator=(const TripleStore&) = delete;

  /// True when the triple was not yet present.
  bool insert(const Triple& t);
  /// Number of newly added triples.
  std::size_t bulk_load(const std::vector<Triple>& triples);
  bool erase(const Triple& t);
  std::size_t size() const;

  std::vector<Triple> match(const std::optional<Term>& s, const std::optional<Term>& p,
                            const std::optional<Term>& o) const;
  bool contains(const Triple& t) const;
  /// Every triple, in SPO id order.
  std::vector<Triple> triples() const;

  // Id-level access for the evaluator.
  std::optional<TermId> id_of(const Term& t) const;
  /// References stay valid for the lifetime of the store.
  const Term& term_of(TermId id) const;
  std::vector<IdTriple> match_ids(const IdPattern& p) const;
  std::size_t count(const IdPattern& p) const;

  std::size_t load_ntriples_file(const std::filesystem::path& path);
  void save_ntriples_file(const std::filesystem::path& path) const;

  /// Checks that the three orderings hold the same set. Test hook.
  bool indexes_coherent() const;

 private:
  enum Order { SPO, POS, OSP };
  TermId intern(const Term& t);
  std::optional<TermId> lookup(const Term& t) const;
  static IdTriple permute(const IdTriple& t, Order order);
  static IdTriple unpermute(const IdTriple& k, Order order);
  std::pair<Order, std::size_t> choose(const IdPattern& p, IdTriple& prefix) const;
  std::pair<std::size_t, std::size_t> range(Order order, const IdTriple& prefix, std::size_t bound) const;
  bool insert_ids(const IdTriple& t);
  bool resolve(const std::optional<Term>& t, std::optional<TermId>& out) const;

  mutable std::shared_mutex mutex_;
  std::unordered_map<Term, TermId, rdf::TermHash> ids_;
  std::deque<Term> terms_;
  std::array<std::vector<IdTriple>, 3> index_;
};

}  // namespace kwg
