#include <algorithm>
#include <limits>
#include <set>

#include <nlohmann/json.hpp>

#include "kwg/query.hpp"

namespace kwg::query {

namespace {

constexpr TermId kUnbound = std::numeric_limits<TermId>::max();

// A pattern position compiled against the dictionary: a variable slot or a
// constant id.
struct Slot {
  int var = -1;
  TermId id = kUnbound;
};

struct Compiled {
  std::array<Slot, 3> pos;
};

using Row = std::vector<TermId>;

IdPattern bind_row(const Compiled& c, const Row& row) {
  IdPattern p;
  std::optional<TermId>* out[3] = {&p.s, &p.p, &p.o};
  for (int k = 0; k < 3; ++k) {
    const Slot& s = c.pos[k];
    if (s.var < 0) {
      *out[k] = s.id;
    } else if (row[s.var] != kUnbound) {
      *out[k] = row[s.var];
    }
  }
  return p;
}

int compare_numbers(double a, double b) { return a < b ? -1 : (a > b ? 1 : 0); }

}  // namespace

bool filter_accepts(CompareOp op, const Term& value, const Term& constant) {
  int cmp = 0;
  const auto a = value.numeric(), b = constant.numeric();
  if (a && b) {
    cmp = compare_numbers(*a, *b);
  } else if (a || b) {
    // Mixed numeric and non-numeric operands are a type error: only != holds.
    return op == CompareOp::Ne;
  } else {
    if (op == CompareOp::Eq) return value == constant;
    if (op == CompareOp::Ne) return value != constant;
    cmp = value.value().compare(constant.value());
    cmp = cmp < 0 ? -1 : (cmp > 0 ? 1 : 0);
  }
  switch (op) {
    case CompareOp::Lt: return cmp < 0;
    case CompareOp::Le: return cmp <= 0;
    case CompareOp::Gt: return cmp > 0;
    case CompareOp::Ge: return cmp >= 0;
    case CompareOp::Eq: return cmp == 0;
    case CompareOp::Ne: return cmp != 0;
  }
  return false;
}

ResultSet evaluate(const Query& q, const TripleStore& store) {
  ResultSet result;
  result.vars = q.projection;
  const auto vars = q.variables();
  auto var_index = [&](const std::string& name) {
    return static_cast<int>(std::find(vars.begin(), vars.end(), name) - vars.begin());
  };

  std::vector<Compiled> pending;
  for (const auto& tp : q.patterns) {
    Compiled c;
    const PatternTerm* parts[3] = {&tp.subject, &tp.predicate, &tp.object};
    for (int k = 0; k < 3; ++k) {
      if (const auto* v = std::get_if<Variable>(parts[k])) {
        c.pos[k].var = var_index(v->name);
      } else {
        const auto id = store.id_of(std::get<Term>(*parts[k]));
        if (!id) return result;  // a constant absent from the store matches nothing
        c.pos[k].id = *id;
      }
    }
    pending.push_back(c);
  }

  std::vector<Row> rows{Row(vars.size(), kUnbound)};
  std::vector<bool> filter_done(q.filters.size(), false);

  auto apply_filters = [&]() {
    for (std::size_t f = 0; f < q.filters.size(); ++f) {
      if (filter_done[f]) continue;
      const int v = var_index(q.filters[f].variable);
      if (rows.empty() || rows.front()[v] == kUnbound) continue;
      std::erase_if(rows, [&](const Row& r) {
        return !filter_accepts(q.filters[f].op, store.term_of(r[v]), q.filters[f].value);
      });
      filter_done[f] = true;
    }
  };

  while (!pending.empty() && !rows.empty()) {
    // Greedy step: the pattern with the fewest candidate extensions.
    std::size_t best = 0, best_cost = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = 0; i < pending.size(); ++i) {
      std::size_t cost = 0;
      for (const auto& r : rows) {
        cost += store.count(bind_row(pending[i], r));
        if (cost >= best_cost) break;
      }
      if (cost < best_cost) {
        best_cost = cost;
        best = i;
      }
    }
    const Compiled c = pending[best];
    pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(best));

    std::vector<Row> next;
    next.reserve(best_cost);
    for (const auto& r : rows) {
      for (const auto& t : store.match_ids(bind_row(c, r))) {
        Row extended = r;
        bool ok = true;
        for (int k = 0; k < 3 && ok; ++k) {
          const int v = c.pos[k].var;
          if (v < 0) continue;
          if (extended[v] == kUnbound) {
            extended[v] = t[k];
          } else {
            ok = extended[v] == t[k];  // repeated variable within one pattern
          }
        }
        if (ok) next.push_back(std::move(extended));
      }
    }
    rows = std::move(next);
    apply_filters();
  }

  std::vector<int> cols;
  for (const auto& v : q.projection) cols.push_back(var_index(v));
  std::set<std::vector<TermId>> seen;
  for (const auto& r : rows) {
    if (q.limit && result.rows.size() >= *q.limit) break;
    std::vector<TermId> key;
    for (int c : cols) key.push_back(r[c]);
    if (q.distinct && !seen.insert(key).second) continue;
    std::vector<Term> out;
    for (TermId id : key) out.push_back(store.term_of(id));
    result.rows.push_back(std::move(out));
  }
  return result;
}

std::string to_json(const ResultSet& r) {
  nlohmann::json j;
  j["head"]["vars"] = r.vars;
  j["rows"] = nlohmann::json::array();
  for (const auto& row : r.rows) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& t : row) cells.push_back(t.ntriples());
    j["rows"].push_back(std::move(cells));
  }
  return j.dump();
}

std::string to_tsv(const ResultSet& r) {
  std::string out;
  for (std::size_t i = 0; i < r.vars.size(); ++i) out += (i ? "\t?" : "?") + r.vars[i];
  out += '\n';
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += '\t';
      out += row[i].ntriples();
    }
    out += '\n';
  }
  return out;
}

}  // namespace kwg::query
