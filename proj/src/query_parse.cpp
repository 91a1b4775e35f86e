#include <algorithm>
#include <cctype>
#include <set>

#include "kwg/query.hpp"

namespace kwg::query {

UnsupportedFeature::UnsupportedFeature(std::string token, int line, int column)
    : Error(ErrorKind::Unsupported, "unsupported query feature '" + token + "' at line " + std::to_string(line) +
                                        ", column " + std::to_string(column)),
      token_(std::move(token)) {}

std::vector<std::string> Query::variables() const {
  std::vector<std::string> out;
  auto add = [&](const PatternTerm& t) {
    if (const auto* v = std::get_if<Variable>(&t)) {
      if (std::find(out.begin(), out.end(), v->name) == out.end()) out.push_back(v->name);
    }
  };
  for (const auto& p : patterns) {
    add(p.subject);
    add(p.predicate);
    add(p.object);
  }
  return out;
}

namespace {

enum class Tok { End, Word, Var, IriRef, PName, String, Number, Punct };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1, column = 1;
};

bool pn_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' ||
         static_cast<unsigned char>(c) >= 0x80;
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skip();
    Token t;
    t.line = line_;
    t.column = static_cast<int>(pos_ - line_start_) + 1;
    if (pos_ >= text_.size()) return t;
    const char c = text_[pos_];
    if (c == '<') {
      // '<' followed by '=' or whitespace is a comparison operator.
      if (pos_ + 1 < text_.size() && (text_[pos_ + 1] == '=' || std::isspace(static_cast<unsigned char>(text_[pos_ + 1])))) {
        return punct(t);
      }
      const std::size_t start = ++pos_;
      while (pos_ < text_.size() && text_[pos_] != '>') {
        if (text_[pos_] == '\n' || text_[pos_] == ' ') fail("unterminated IRI", t);
        ++pos_;
      }
      if (pos_ >= text_.size()) fail("unterminated IRI", t);
      t.kind = Tok::IriRef;
      t.text = std::string(text_.substr(start, pos_ - start));
      ++pos_;
      return t;
    }
    if (c == '?' || c == '$') {
      const std::size_t start = ++pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      if (pos_ == start) fail("empty variable name", t);
      t.kind = Tok::Var;
      t.text = std::string(text_.substr(start, pos_ - start));
      return t;
    }
    if (c == '"' || c == '\'') return string(t, c);
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        ((c == '-' || c == '+') && pos_ + 1 < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
      const std::size_t start = pos_++;
      while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' ||
                                     text_[pos_] == 'e' || text_[pos_] == 'E' ||
                                     ((text_[pos_] == '-' || text_[pos_] == '+') &&
                                      (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E'))))
        ++pos_;
      while (pos_ > start + 1 && text_[pos_ - 1] == '.') --pos_;  // statement terminator
      t.kind = Tok::Number;
      t.text = std::string(text_.substr(start, pos_ - start));
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == ':' || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && (pn_char(text_[pos_]) || text_[pos_] == ':' || text_[pos_] == '%')) ++pos_;
      while (pos_ > start && text_[pos_ - 1] == '.') --pos_;
      t.text = std::string(text_.substr(start, pos_ - start));
      t.kind = t.text.find(':') == std::string::npos ? Tok::Word : Tok::PName;
      return t;
    }
    return punct(t);
  }

  [[noreturn]] void fail(const std::string& message, const Token& at) const {
    throw ParseError("query: " + message, at.line, at.column);
  }

 private:
  Token punct(Token t) {
    static const char* two[] = {"<=", ">=", "!=", "^^", "&&", "||"};
    for (const char* op : two) {
      if (text_.substr(pos_, 2) == op) {
        t.kind = Tok::Punct;
        t.text = op;
        pos_ += 2;
        return t;
      }
    }
    t.kind = Tok::Punct;
    t.text = std::string(1, text_[pos_++]);
    return t;
  }

  Token string(Token t, char quote) {
    ++pos_;
    std::string value;
    while (true) {
      if (pos_ >= text_.size() || text_[pos_] == '\n') fail("unterminated string", t);
      const char c = text_[pos_++];
      if (c == quote) break;
      if (c == '\\' && pos_ < text_.size()) {
        const char e = text_[pos_++];
        switch (e) {
          case 'n': value += '\n'; break;
          case 't': value += '\t'; break;
          case 'r': value += '\r'; break;
          default: value += e;
        }
      } else {
        value += c;
      }
    }
    t.kind = Tok::String;
    t.text = std::move(value);
    return t;
  }

  void skip() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '\n') {
        ++line_;
        line_start_ = ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::size_t line_start_ = 0;
};

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

const std::set<std::string>& unsupported_keywords() {
  static const std::set<std::string> words = {"OPTIONAL", "UNION",  "MINUS",   "GRAPH", "BIND",     "VALUES",
                                              "SERVICE",  "ORDER",  "GROUP",   "HAVING", "CONSTRUCT", "ASK",
                                              "DESCRIBE", "OFFSET", "INSERT",  "DELETE", "FROM",     "EXISTS",
                                              "NOT",      "REGEX",  "BOUND",   "STR",    "LANG",     "COUNT"};
  return words;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : lex_(text) { advance(); }

  Query parse() {
    prologue();
    expect_word("SELECT", "expected SELECT");
    if (is_word("DISTINCT")) {
      q_.distinct = true;
      advance();
    } else if (is_word("REDUCED")) {
      unsupported();
    }
    std::vector<Token> projected;
    if (cur_.kind == Tok::Punct && cur_.text == "*") {
      q_.select_all = true;
      advance();
    } else {
      while (cur_.kind == Tok::Var) {
        projected.push_back(cur_);
        advance();
      }
      if (cur_.kind == Tok::Punct && cur_.text == "(") unsupported();
      if (projected.empty()) lex_.fail("expected '*' or variables after SELECT", cur_);
    }
    if (is_word("FROM")) unsupported();
    expect_word("WHERE", "missing WHERE");
    expect_punct("{");
    group();
    expect_punct("}");
    modifiers();
    if (cur_.kind != Tok::End) stray();

    const auto vars = q_.variables();
    if (q_.select_all) {
      q_.projection = vars;
    } else {
      for (const auto& t : projected) {
        if (std::find(vars.begin(), vars.end(), t.text) == vars.end()) {
          lex_.fail("projected variable ?" + t.text + " does not occur in the pattern", t);
        }
        if (std::find(q_.projection.begin(), q_.projection.end(), t.text) == q_.projection.end())
          q_.projection.push_back(t.text);
      }
    }
    for (const auto& [f, at] : filter_tokens_) {
      if (std::find(vars.begin(), vars.end(), f) == vars.end()) {
        lex_.fail("filter variable ?" + f + " does not occur in the pattern", at);
      }
    }
    return std::move(q_);
  }

 private:
  void advance() { cur_ = lex_.next(); }

  bool is_word(const char* w) const { return cur_.kind == Tok::Word && upper(cur_.text) == w; }
  bool is_punct(const char* p) const { return cur_.kind == Tok::Punct && cur_.text == p; }

  void expect_word(const char* w, const char* message) {
    if (cur_.kind == Tok::Word && unsupported_keywords().contains(upper(cur_.text))) unsupported();
    if (!is_word(w)) lex_.fail(message, cur_);
    advance();
  }
  void expect_punct(const char* p) {
    if (!is_punct(p)) {
      if (cur_.kind == Tok::End) lex_.fail(std::string("unexpected end of query, expected '") + p + "'", cur_);
      stray();
    }
    advance();
  }

  [[noreturn]] void unsupported() { throw UnsupportedFeature(cur_.text, cur_.line, cur_.column); }
  [[noreturn]] void stray() {
    if (cur_.kind == Tok::Word && unsupported_keywords().contains(upper(cur_.text))) unsupported();
    lex_.fail("unexpected token '" + cur_.text + "'", cur_);
  }

  void prologue() {
    while (true) {
      if (is_word("PREFIX")) {
        advance();
        if (cur_.kind != Tok::PName || cur_.text.back() != ':') lex_.fail("expected prefix name", cur_);
        std::string name = cur_.text.substr(0, cur_.text.size() - 1);
        advance();
        if (cur_.kind != Tok::IriRef) lex_.fail("expected IRI after PREFIX", cur_);
        q_.prefixes[name] = cur_.text;
        advance();
      } else if (is_word("BASE")) {
        unsupported();
      } else {
        return;
      }
    }
  }

  Term resolve_pname(const Token& t) {
    const auto colon = t.text.find(':');
    const std::string prefix = t.text.substr(0, colon);
    const std::string local = t.text.substr(colon + 1);
    if (auto it = q_.prefixes.find(prefix); it != q_.prefixes.end()) return Term::iri(it->second + local);
    for (const auto& p : rdf::namespace_table()) {
      if (p.name == prefix) return Term::iri(std::string(p.iri) + local);
    }
    lex_.fail("unknown prefix '" + prefix + ":'", t);
  }

  Term iri_term() {
    Token t = cur_;
    advance();
    if (t.kind == Tok::IriRef) {
      try {
        return Term::iri(t.text);
      } catch (const Error& e) {
        lex_.fail(e.what(), t);
      }
    }
    return resolve_pname(t);
  }

  Term literal_term() {
    Token t = cur_;
    advance();
    try {
      if (t.kind == Tok::Number) {
        if (t.text.find_first_of("eE") != std::string::npos) return Term::typed(t.text, "double");
        if (t.text.find('.') != std::string::npos) return Term::typed(t.text, "decimal");
        return Term::typed(t.text, "integer");
      }
      if (t.kind == Tok::Word) return Term::typed(upper(t.text) == "TRUE" ? "true" : "false", "boolean");
      if (is_punct("^^")) {
        advance();
        if (cur_.kind != Tok::IriRef && cur_.kind != Tok::PName) lex_.fail("expected datatype IRI", cur_);
        const Term dt = iri_term();
        return Term::literal(t.text, dt.value());
      }
      if (is_punct("@")) unsupported();
      return Term::literal(t.text);
    } catch (const ParseError&) {
      throw;
    } catch (const UnsupportedFeature&) {
      throw;
    } catch (const Error& e) {
      lex_.fail(e.what(), t);
    }
  }

  bool at_term_start() const {
    return cur_.kind == Tok::Var || cur_.kind == Tok::IriRef || cur_.kind == Tok::PName || cur_.kind == Tok::String ||
           cur_.kind == Tok::Number || is_word("TRUE") || is_word("FALSE");
  }

  PatternTerm node(bool allow_literal) {
    if (cur_.kind == Tok::Var) {
      Variable v{cur_.text};
      advance();
      return v;
    }
    if (cur_.kind == Tok::PName && cur_.text.starts_with("_:")) unsupported();
    if (cur_.kind == Tok::IriRef || cur_.kind == Tok::PName) return iri_term();
    if (cur_.kind == Tok::Punct && (cur_.text == "[" || cur_.text == "(")) unsupported();
    if (allow_literal && (cur_.kind == Tok::String || cur_.kind == Tok::Number || is_word("TRUE") || is_word("FALSE")))
      return literal_term();
    if (cur_.kind == Tok::End) lex_.fail("incomplete triple pattern", cur_);
    if (is_punct("}") || is_punct(".") || is_punct(";") || is_punct(",")) lex_.fail("incomplete triple pattern", cur_);
    stray();
  }

  PatternTerm verb() {
    if (cur_.kind == Tok::Word && cur_.text == "a") {
      advance();
      return Term::iri(std::string(rdf::ns::rdf) + "type");
    }
    if (is_punct("^") || is_punct("!") || is_punct("(")) unsupported();
    if (cur_.kind == Tok::String || cur_.kind == Tok::Number) lex_.fail("literal in predicate position", cur_);
    PatternTerm p = node(false);
    if (is_punct("/") || is_punct("|") || is_punct("*") || is_punct("+") || is_punct("?")) unsupported();
    return p;
  }

  void group() {
    while (!is_punct("}")) {
      if (cur_.kind == Tok::End) lex_.fail("unexpected end of query, expected '}'", cur_);
      if (is_word("FILTER")) {
        filter();
        if (is_punct(".")) advance();
        continue;
      }
      if (is_punct("{")) unsupported();
      if (cur_.kind == Tok::Word && unsupported_keywords().contains(upper(cur_.text))) unsupported();
      if (!at_term_start()) stray();
      if (cur_.kind != Tok::Var && cur_.kind != Tok::IriRef && cur_.kind != Tok::PName)
        lex_.fail("subject must be a variable or IRI", cur_);
      PatternTerm s = node(false);
      while (true) {
        PatternTerm p = verb();
        while (true) {
          PatternTerm o = node(true);
          q_.patterns.push_back({s, p, o});
          if (!is_punct(",")) break;
          advance();
        }
        if (!is_punct(";")) break;
        advance();
        if (is_punct(".") || is_punct("}")) break;  // trailing ';'
      }
      if (is_punct(".")) {
        advance();
      } else if (!is_punct("}") && !is_word("FILTER")) {
        if (cur_.kind == Tok::End) lex_.fail("unexpected end of query, expected '}'", cur_);
        stray();
      }
    }
  }

  void filter() {
    advance();
    expect_punct("(");
    if (cur_.kind != Tok::Var) {
      if (cur_.kind == Tok::Word) unsupported();
      lex_.fail("FILTER expects ?var <op> constant", cur_);
    }
    Filter f;
    f.variable = cur_.text;
    filter_tokens_.emplace_back(cur_.text, cur_);
    advance();
    static const std::map<std::string, CompareOp> ops = {{"<", CompareOp::Lt}, {"<=", CompareOp::Le},
                                                         {">", CompareOp::Gt}, {">=", CompareOp::Ge},
                                                         {"=", CompareOp::Eq}, {"!=", CompareOp::Ne}};
    if (cur_.kind != Tok::Punct || !ops.contains(cur_.text)) {
      if (is_punct("&&") || is_punct("||")) unsupported();
      lex_.fail("expected comparison operator", cur_);
    }
    f.op = ops.at(cur_.text);
    advance();
    if (cur_.kind == Tok::Var) unsupported();
    if (cur_.kind == Tok::IriRef || cur_.kind == Tok::PName) {
      f.value = iri_term();
    } else if (cur_.kind == Tok::String || cur_.kind == Tok::Number || is_word("TRUE") || is_word("FALSE")) {
      f.value = literal_term();
    } else {
      lex_.fail("expected constant in FILTER", cur_);
    }
    if (is_punct("&&") || is_punct("||")) unsupported();
    expect_punct(")");
    q_.filters.push_back(std::move(f));
  }

  void modifiers() {
    while (cur_.kind != Tok::End) {
      if (is_word("LIMIT")) {
        advance();
        if (cur_.kind != Tok::Number || cur_.text.find_first_not_of("0123456789") != std::string::npos)
          lex_.fail("LIMIT expects a non-negative integer", cur_);
        q_.limit = std::stoull(cur_.text);
        advance();
      } else if (cur_.kind == Tok::Word && unsupported_keywords().contains(upper(cur_.text))) {
        unsupported();
      } else {
        stray();
      }
    }
  }

  Lexer lex_;
  Token cur_;
  Query q_;
  std::vector<std::pair<std::string, Token>> filter_tokens_;
};

}  // namespace

Query parse_query(std::string_view text) { return Parser(text).parse(); }

}  // namespace kwg::query
