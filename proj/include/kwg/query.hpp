#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "kwg/error.hpp"
#include "kwg/store.hpp"

namespace kwg::query {

/// A recognised SPARQL construct outside the supported subset.
class UnsupportedFeature : public Error {
 public:
  UnsupportedFeature(std::string token, int line, int column);
  const std::string& token() const noexcept { return token_; }

 private:
  std::string token_;
};

struct Variable {
  std::string name;  // without '?'
  friend bool operator==(const Variable&, const Variable&) = default;
};

using PatternTerm = std::variant<Variable, Term>;

struct TriplePattern {
  PatternTerm subject, predicate, object;
};

enum class CompareOp { Lt, Le, Gt, Ge, Eq, Ne };

struct Filter {
  std::string variable;
  CompareOp op = CompareOp::Eq;
  Term value;
};

struct Query {
  std::map<std::string, std::string> prefixes;  // declared in the text
  bool select_all = false;
  bool distinct = false;
  std::vector<std::string> projection;  // resolved: variables in output order
  std::vector<TriplePattern> patterns;
  std::vector<Filter> filters;
  std::optional<std::size_t> limit;

  /// Distinct pattern variables in order of first appearance.
  std::vector<std::string> variables() const;
};

/// Throws ParseError (with line/column) or UnsupportedFeature.
Query parse_query(std::string_view text);

struct ResultSet {
  std::vector<std::string> vars;
  std::vector<std::vector<Term>> rows;
};

/// Natural join of the patterns, joined greedily by the smallest candidate
/// count against the current partial rows, then filtered and projected.
ResultSet evaluate(const Query& q, const TripleStore& store);
inline ResultSet run(std::string_view text, const TripleStore& store) { return evaluate(parse_query(text), store); }

/// {"head":{"vars":[...]},"rows":[[term, ...], ...]} with N-Triples terms.
std::string to_json(const ResultSet& r);
/// Tab-separated, header line first.
std::string to_tsv(const ResultSet& r);

bool filter_accepts(CompareOp op, const Term& value, const Term& constant);

}  // namespace kwg::query
