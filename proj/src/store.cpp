#include "kwg/store.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <sstream>

#include "kwg/error.hpp"

namespace kwg {

IdTriple TripleStore::permute(const IdTriple& t, Order order) {
  switch (order) {
    case SPO: return t;
    case POS: return {t[1], t[2], t[0]};
    case OSP: return {t[2], t[0], t[1]};
  }
  return t;
}

IdTriple TripleStore::unpermute(const IdTriple& k, Order order) {
  switch (order) {
    case SPO: return k;
    case POS: return {k[2], k[0], k[1]};
    case OSP: return {k[1], k[2], k[0]};
  }
  return k;
}

TermId TripleStore::intern(const Term& t) {
  auto it = ids_.find(t);
  if (it != ids_.end()) return it->second;
  const auto id = static_cast<TermId>(terms_.size());
  terms_.push_back(t);
  ids_.emplace(t, id);
  return id;
}

std::optional<TermId> TripleStore::lookup(const Term& t) const {
  auto it = ids_.find(t);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

bool TripleStore::insert_ids(const IdTriple& t) {
  auto& spo = index_[SPO];
  auto pos = std::lower_bound(spo.begin(), spo.end(), t);
  if (pos != spo.end() && *pos == t) return false;
  spo.insert(pos, t);
  for (Order o : {POS, OSP}) {
    const IdTriple k = permute(t, o);
    auto& idx = index_[o];
    idx.insert(std::lower_bound(idx.begin(), idx.end(), k), k);
  }
  return true;
}

bool TripleStore::insert(const Triple& t) {
  std::unique_lock lock(mutex_);
  return insert_ids({intern(t.subject), intern(t.predicate), intern(t.object)});
}

std::size_t TripleStore::bulk_load(const std::vector<Triple>& triples) {
  std::unique_lock lock(mutex_);
  const std::size_t before = index_[SPO].size();
  std::vector<IdTriple> spo = std::move(index_[SPO]);
  spo.reserve(spo.size() + triples.size());
  for (const auto& t : triples) spo.push_back({intern(t.subject), intern(t.predicate), intern(t.object)});
  std::sort(spo.begin(), spo.end());
  spo.erase(std::unique(spo.begin(), spo.end()), spo.end());
  for (Order o : {POS, OSP}) {
    auto& idx = index_[o];
    idx.clear();
    idx.reserve(spo.size());
    for (const auto& t : spo) idx.push_back(permute(t, o));
    std::sort(idx.begin(), idx.end());
  }
  index_[SPO] = std::move(spo);
  return index_[SPO].size() - before;
}

bool TripleStore::erase(const Triple& t) {
  std::unique_lock lock(mutex_);
  const auto s = lookup(t.subject), p = lookup(t.predicate), o = lookup(t.object);
  if (!s || !p || !o) return false;
  const IdTriple key{*s, *p, *o};
  auto& spo = index_[SPO];
  auto it = std::lower_bound(spo.begin(), spo.end(), key);
  if (it == spo.end() || *it != key) return false;
  spo.erase(it);
  for (Order ord : {POS, OSP}) {
    auto& idx = index_[ord];
    idx.erase(std::lower_bound(idx.begin(), idx.end(), permute(key, ord)));
  }
  return true;
}

std::size_t TripleStore::size() const {
  std::shared_lock lock(mutex_);
  return index_[SPO].size();
}

std::optional<TermId> TripleStore::id_of(const Term& t) const {
  std::shared_lock lock(mutex_);
  return lookup(t);
}

const Term& TripleStore::term_of(TermId id) const {
  std::shared_lock lock(mutex_);
  return terms_.at(id);
}

// Picks the ordering whose key prefix covers exactly the bound positions.
std::pair<TripleStore::Order, std::size_t> TripleStore::choose(const IdPattern& p, IdTriple& prefix) const {
  const bool s = p.s.has_value(), pr = p.p.has_value(), o = p.o.has_value();
  Order order = SPO;
  if (s && !pr && o) {
    order = OSP;
  } else if (!s && pr) {
    order = POS;
  } else if (!s && !pr && o) {
    order = OSP;
  }
  const IdTriple full{p.s.value_or(0), p.p.value_or(0), p.o.value_or(0)};
  prefix = permute(full, order);
  const std::size_t bound = static_cast<std::size_t>(s) + pr + o;
  return {order, bound};
}

std::pair<std::size_t, std::size_t> TripleStore::range(Order order, const IdTriple& prefix, std::size_t bound) const {
  const auto& idx = index_[order];
  if (bound == 0) return {0, idx.size()};
  auto cmp_lo = [&](const IdTriple& a, const IdTriple& b) {
    return std::lexicographical_compare(a.begin(), a.begin() + bound, b.begin(), b.begin() + bound);
  };
  auto [lo, hi] = std::equal_range(idx.begin(), idx.end(), prefix, cmp_lo);
  return {static_cast<std::size_t>(lo - idx.begin()), static_cast<std::size_t>(hi - idx.begin())};
}

std::vector<IdTriple> TripleStore::match_ids(const IdPattern& p) const {
  std::shared_lock lock(mutex_);
  IdTriple prefix{};
  const auto [order, bound] = choose(p, prefix);
  const auto [lo, hi] = range(order, prefix, bound);
  std::vector<IdTriple> out;
  out.reserve(hi - lo);
  for (std::size_t i = lo; i < hi; ++i) out.push_back(unpermute(index_[order][i], order));
  return out;
}

std::size_t TripleStore::count(const IdPattern& p) const {
  std::shared_lock lock(mutex_);
  IdTriple prefix{};
  const auto [order, bound] = choose(p, prefix);
  const auto [lo, hi] = range(order, prefix, bound);
  return hi - lo;
}

bool TripleStore::resolve(const std::optional<Term>& t, std::optional<TermId>& out) const {
  if (!t) return true;
  out = id_of(*t);
  return out.has_value();
}

std::vector<Triple> TripleStore::match(const std::optional<Term>& s, const std::optional<Term>& p,
                                       const std::optional<Term>& o) const {
  IdPattern pat;
  if (!resolve(s, pat.s) || !resolve(p, pat.p) || !resolve(o, pat.o)) return {};
  std::vector<Triple> out;
  for (const auto& t : match_ids(pat)) out.push_back({term_of(t[0]), term_of(t[1]), term_of(t[2])});
  return out;
}

bool TripleStore::contains(const Triple& t) const { return !match(t.subject, t.predicate, t.object).empty(); }

std::vector<Triple> TripleStore::triples() const { return match(std::nullopt, std::nullopt, std::nullopt); }

std::size_t TripleStore::load_ntriples_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::NotFound, "cannot open graph file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return bulk_load(rdf::parse_ntriples(buf.str()));
}

void TripleStore::save_ntriples_file(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Data, "cannot write " + path.string());
  out << rdf::serialize_ntriples(triples());
}

bool TripleStore::indexes_coherent() const {
  std::shared_lock lock(mutex_);
  const auto& spo = index_[SPO];
  for (Order o : {POS, OSP}) {
    const auto& idx = index_[o];
    if (idx.size() != spo.size()) return false;
    std::vector<IdTriple> back;
    back.reserve(idx.size());
    for (const auto& k : idx) back.push_back(unpermute(k, o));
    std::sort(back.begin(), back.end());
    if (back != spo) return false;
    if (!std::is_sorted(idx.begin(), idx.end())) return false;
  }
  return std::adjacent_find(spo.begin(), spo.end()) == spo.end();
}

}  // namespace kwg
