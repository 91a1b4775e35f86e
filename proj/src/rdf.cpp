#include "kwg/rdf.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <tuple>
#include <charconv>
#include <cstdio>
#include <map>

#include "kwg/error.hpp"

namespace kwg::rdf {

const std::vector<Prefix>& namespace_table() {
  static const std::vector<Prefix> table = {
      {"kwg-ont", ns::kwg_ont}, {"kwgr", ns::kwgr}, {"sosa", ns::sosa},
      {"geo", ns::geo},         {"rdf", ns::rdf},   {"rdfs", ns::rdfs},
      {"xsd", ns::xsd},         {"time", ns::time}, {"qudt-unit", ns::qudt_unit},
  };
  return table;
}

std::string expand(std::string_view text) {
  if (text.size() >= 2 && text.front() == '<' && text.back() == '>') {
    return std::string(text.substr(1, text.size() - 2));
  }
  const auto colon = text.find(':');
  if (colon != std::string_view::npos) {
    const std::string_view prefix = text.substr(0, colon);
    for (const auto& p : namespace_table()) {
      if (p.name == prefix) return iri(p.iri, text.substr(colon + 1));
    }
    if (text.substr(colon + 1).starts_with("//")) return std::string(text);  // already absolute
  }
  throw Error(ErrorKind::InvalidArgument, "unknown prefix in '" + std::string(text) + "'");
}

namespace {

bool safe_local(std::string_view local) {
  if (local.empty()) return true;
  if (local.back() == '.' || local.front() == '.' || local.front() == '-') return false;
  for (char c : local) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                    c == '-' || c == '.';
    if (!ok) return false;
  }
  return true;
}

}  // namespace

std::optional<std::string> compact(std::string_view value) {
  const Prefix* best = nullptr;
  for (const auto& p : namespace_table()) {
    if (value.starts_with(p.iri) && (!best || p.iri.size() > best->iri.size())) best = &p;
  }
  if (!best) return std::nullopt;
  const std::string_view local = value.substr(best->iri.size());
  if (!safe_local(local)) return std::nullopt;
  return std::string(best->name) + ":" + std::string(local);
}

std::string_view local_name(std::string_view value) {
  const auto pos = value.find_last_of("/#:");
  return pos == std::string_view::npos ? value : value.substr(pos + 1);
}

bool in_namespace_table(std::string_view value) {
  return std::any_of(namespace_table().begin(), namespace_table().end(),
                     [&](const Prefix& p) { return value.starts_with(p.iri); });
}

Term Term::iri(std::string value) {
  if (value.empty()) throw Error(ErrorKind::InvalidArgument, "empty IRI");
  for (char c : value) {
    if (static_cast<unsigned char>(c) <= 0x20 || c == '<' || c == '>' || c == '"' || c == '{' || c == '}' ||
        c == '|' || c == '^' || c == '`' || c == '\\') {
      throw Error(ErrorKind::InvalidArgument, "invalid character in IRI '" + value + "'");
    }
  }
  return Term(TermKind::Iri, std::move(value), {});
}

Term Term::blank(std::string label) {
  if (label.empty()) throw Error(ErrorKind::InvalidArgument, "empty blank node label");
  return Term(TermKind::BlankNode, std::move(label), {});
}

Term Term::literal(std::string lexical, std::string datatype) {
  if (datatype.empty()) throw Error(ErrorKind::InvalidArgument, "literal without datatype");
  Term t(TermKind::Literal, std::move(lexical), std::move(datatype));
  if (t.datatype_.starts_with(ns::xsd)) {
    const std::string_view local = std::string_view(t.datatype_).substr(ns::xsd.size());
    const bool numeric_type = local == "integer" || local == "decimal" || local == "double" || local == "float" ||
                              local == "int" || local == "long";
    if (numeric_type && !t.numeric()) {
      throw Error(ErrorKind::InvalidArgument, "'" + t.value_ + "' is not a valid xsd:" + std::string(local));
    }
  }
  return t;
}

std::optional<double> Term::numeric() const {
  if (kind_ != TermKind::Literal || !datatype_.starts_with(ns::xsd)) return std::nullopt;
  const std::string_view local = std::string_view(datatype_).substr(ns::xsd.size());
  if (local != "integer" && local != "decimal" && local != "double" && local != "float" && local != "int" &&
      local != "long")
    return std::nullopt;
  std::string_view text = value_;
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    if (text == "INF") return HUGE_VAL;
    if (text == "-INF") return -HUGE_VAL;
    return std::nullopt;
  }
  if ((local == "integer" || local == "int" || local == "long") &&
      text.find_first_of(".eE") != std::string_view::npos)
    return std::nullopt;
  return v;
}

std::string escape_literal(std::string_view lexical) {
  std::string out;
  out.reserve(lexical.size());
  for (char c : lexical) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04X", static_cast<unsigned>(c));
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

std::string Term::ntriples() const {
  switch (kind_) {
    case TermKind::Iri: return "<" + value_ + ">";
    case TermKind::BlankNode: return "_:" + value_;
    case TermKind::Literal: return "\"" + escape_literal(value_) + "\"^^<" + datatype_ + ">";
  }
  return {};
}

namespace {

struct Keyed {
  std::string s, p, o;
  const Triple* t;
};

std::vector<Keyed> sorted_unique(const std::vector<Triple>& triples) {
  std::vector<Keyed> keyed;
  keyed.reserve(triples.size());
  for (const auto& t : triples) keyed.push_back({t.subject.ntriples(), t.predicate.ntriples(), t.object.ntriples(), &t});
  std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    return std::tie(a.s, a.p, a.o) < std::tie(b.s, b.p, b.o);
  });
  keyed.erase(std::unique(keyed.begin(), keyed.end(),
                          [](const Keyed& a, const Keyed& b) { return a.s == b.s && a.p == b.p && a.o == b.o; }),
              keyed.end());
  return keyed;
}

std::string turtle_term(const Term& t) {
  if (t.is_iri()) {
    if (t.value() == std::string(ns::rdf) + "type") return "a";
    if (auto c = compact(t.value())) return *c;
    return t.ntriples();
  }
  if (t.is_literal()) {
    std::string out = "\"" + escape_literal(t.value()) + "\"^^";
    if (auto c = compact(t.datatype())) return out + *c;
    return out + "<" + t.datatype() + ">";
  }
  return t.ntriples();
}

}  // namespace

std::string serialize_ntriples(std::vector<Triple> triples) {
  std::string out;
  for (const auto& k : sorted_unique(triples)) {
    out += k.s;
    out += ' ';
    out += k.p;
    out += ' ';
    out += k.o;
    out += " .\n";
  }
  return out;
}

std::string serialize_turtle(std::vector<Triple> triples) {
  const auto keyed = sorted_unique(triples);
  std::string out;
  if (keyed.empty()) return out;
  for (const auto& p : namespace_table()) {
    out += "@prefix " + std::string(p.name) + ": <" + std::string(p.iri) + "> .\n";
  }
  const std::string* subject = nullptr;
  const std::string* predicate = nullptr;
  for (const auto& k : keyed) {
    if (!subject || *subject != k.s) {
      if (subject) out += " .\n";
      out += "\n" + turtle_term(k.t->subject) + "\n    " + turtle_term(k.t->predicate) + " " +
             turtle_term(k.t->object);
      subject = &k.s;
      predicate = &k.p;
    } else if (*predicate != k.p) {
      out += " ;\n    " + turtle_term(k.t->predicate) + " " + turtle_term(k.t->object);
      predicate = &k.p;
    } else {
      out += " ,\n        " + turtle_term(k.t->object);
    }
  }
  if (subject) out += " .\n";
  return out;
}

namespace {

class NTriplesReader {
 public:
  explicit NTriplesReader(std::string_view text) : text_(text) {}

  std::vector<Triple> read() {
    std::vector<Triple> out;
    while (true) {
      skip_blank_and_comments();
      if (pos_ >= text_.size()) break;
      Term s = subject();
      skip_ws();
      Term p = iri_ref();
      skip_ws();
      Term o = object();
      skip_ws();
      if (pos_ >= text_.size() || text_[pos_] != '.') fail("expected '.'");
      ++pos_;
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      }
      if (pos_ < text_.size() && text_[pos_] != '\n' && text_[pos_] != '\r') fail("trailing characters");
      out.push_back({std::move(s), std::move(p), std::move(o)});
    }
    return out;
  }

 private:
  Term subject() {
    if (peek() == '<') return iri_ref();
    if (peek() == '_') return blank();
    fail("expected IRI or blank node subject");
  }

  Term object() {
    if (peek() == '<') return iri_ref();
    if (peek() == '_') return blank();
    if (peek() == '"') return literal();
    fail("expected object term");
  }

  Term iri_ref() {
    if (peek() != '<') fail("expected '<'");
    const std::size_t start = ++pos_;
    while (pos_ < text_.size() && text_[pos_] != '>') {
      if (text_[pos_] == '\n') fail("unterminated IRI");
      ++pos_;
    }
    if (pos_ >= text_.size()) fail("unterminated IRI");
    std::string value(text_.substr(start, pos_ - start));
    ++pos_;
    try {
      return Term::iri(std::move(value));
    } catch (const Error& e) {
      fail(e.what());
    }
  }

  Term blank() {
    if (text_.substr(pos_, 2) != "_:") fail("expected blank node");
    pos_ += 2;
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '.') ++pos_;
    return Term::blank(std::string(text_.substr(start, pos_ - start)));
  }

  Term literal() {
    ++pos_;  // opening quote
    std::string lexical;
    while (true) {
      if (pos_ >= text_.size() || text_[pos_] == '\n') fail("unterminated literal");
      const char c = text_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        lexical += c;
        continue;
      }
      if (pos_ >= text_.size()) fail("bad escape");
      const char e = text_[pos_++];
      switch (e) {
        case 'n': lexical += '\n'; break;
        case 'r': lexical += '\r'; break;
        case 't': lexical += '\t'; break;
        case 'b': lexical += '\b'; break;
        case 'f': lexical += '\f'; break;
        case '"': lexical += '"'; break;
        case '\'': lexical += '\''; break;
        case '\\': lexical += '\\'; break;
        case 'u':
        case 'U': {
          const std::size_t n = e == 'u' ? 4 : 8;
          if (pos_ + n > text_.size()) fail("bad unicode escape");
          unsigned cp = 0;
          auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + pos_ + n, cp, 16);
          if (ec != std::errc() || ptr != text_.data() + pos_ + n) fail("bad unicode escape");
          pos_ += n;
          append_utf8(lexical, cp);
          break;
        }
        default: fail("unknown escape");
      }
    }
    if (text_.substr(pos_, 2) == "^^") {
      pos_ += 2;
      Term dt = iri_ref();
      try {
        return Term::literal(std::move(lexical), dt.value());
      } catch (const Error& err) {
        fail(err.what());
      }
    }
    if (peek() == '@') fail("language-tagged literals are not supported");
    return Term::literal(std::move(lexical));
  }

  static void append_utf8(std::string& out, unsigned cp) {
    if (cp < 0x80) {
      out += static_cast<char>(cp);
    } else if (cp < 0x800) {
      out += static_cast<char>(0xC0 | (cp >> 6));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
      out += static_cast<char>(0xE0 | (cp >> 12));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
      out += static_cast<char>(0xF0 | (cp >> 18));
      out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    }
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  void skip_blank_and_comments() {
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

  [[noreturn]] void fail(const std::string& message) {
    throw ParseError("N-Triples: " + message, line_, static_cast<int>(pos_ - line_start_) + 1);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::size_t line_start_ = 0;
};

}  // namespace

std::vector<Triple> parse_ntriples(std::string_view text) { return NTriplesReader(text).read(); }

}  // namespace kwg::rdf
