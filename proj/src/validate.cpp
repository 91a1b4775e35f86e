#include "kwg/validate.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "kwg/error.hpp"

namespace kwg::validate {

using nlohmann::json;

std::string_view to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::MinCount: return "min_count";
    case ViolationKind::MaxCount: return "max_count";
    case ViolationKind::Datatype: return "datatype";
    case ViolationKind::ValueClass: return "value_class";
  }
  return "";
}

namespace {

std::string expand_field(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return {};
  if (!j[key].is_string()) throw Error(ErrorKind::Data, std::string("shapes: '") + key + "' must be a string");
  try {
    return rdf::expand(j[key].get<std::string>());
  } catch (const Error& e) {
    throw Error(ErrorKind::Data, std::string("shapes: ") + e.what());
  }
}

const std::string& rdf_type() {
  static const std::string s = rdf::iri(rdf::ns::rdf, "type");
  return s;
}

// The class and everything below it in the rdfs:subClassOf hierarchy.
std::set<std::string> subclasses(const TripleStore& store, const std::string& cls) {
  const Term sub = Term::iri(rdf::iri(rdf::ns::rdfs, "subClassOf"));
  std::set<std::string> seen{cls};
  std::vector<std::string> stack{cls};
  while (!stack.empty()) {
    const std::string c = stack.back();
    stack.pop_back();
    for (const auto& t : store.match(std::nullopt, sub, Term::iri(c))) {
      if (t.subject.is_iri() && seen.insert(t.subject.value()).second) stack.push_back(t.subject.value());
    }
  }
  return seen;
}

std::set<Term> instances_of(const TripleStore& store, const std::string& cls) {
  std::set<Term> out;
  const Term type = Term::iri(rdf_type());
  for (const auto& c : subclasses(store, cls)) {
    for (const auto& t : store.match(std::nullopt, type, Term::iri(c))) out.insert(t.subject);
  }
  return out;
}

}  // namespace

std::vector<Shape> parse_shapes(const json& j) {
  if (!j.is_object() || !j.contains("shapes") || !j["shapes"].is_array()) {
    throw Error(ErrorKind::Data, "shapes: expected {\"shapes\": [...]}");
  }
  std::vector<Shape> out;
  std::set<std::string> ids;
  for (const auto& s : j["shapes"]) {
    Shape shape;
    if (!s.contains("id") || !s["id"].is_string()) throw Error(ErrorKind::Data, "shapes: shape without id");
    shape.id = s["id"];
    if (!ids.insert(shape.id).second) throw Error(ErrorKind::Data, "shapes: duplicate id '" + shape.id + "'");
    shape.target_class = expand_field(s, "target_class");
    if (shape.target_class.empty()) throw Error(ErrorKind::Data, "shapes: '" + shape.id + "' has no target_class");
    for (const auto& c : s.value("constraints", json::array())) {
      Constraint k;
      if (!c.contains("path")) throw Error(ErrorKind::Data, "shapes: constraint without path in '" + shape.id + "'");
      const json& p = c["path"];
      try {
        if (p.is_string()) {
          k.path.push_back(rdf::expand(p.get<std::string>()));
        } else if (p.is_array() && !p.empty()) {
          for (const auto& alt : p) k.path.push_back(rdf::expand(alt.get<std::string>()));
        } else {
          throw Error(ErrorKind::Data, "path must be an IRI or a nonempty list of IRIs");
        }
      } catch (const Error& e) {
        throw Error(ErrorKind::Data, "shapes: '" + shape.id + "': " + e.what());
      } catch (const json::exception& e) {
        throw Error(ErrorKind::Data, "shapes: '" + shape.id + "': " + e.what());
      }
      k.min_count = c.value("min_count", 0);
      if (c.contains("max_count") && !c["max_count"].is_null()) k.max_count = c["max_count"].get<int>();
      if (k.min_count < 0 || (k.max_count && *k.max_count < k.min_count)) {
        throw Error(ErrorKind::Data, "shapes: '" + shape.id + "': need 0 <= min_count <= max_count");
      }
      k.datatype = expand_field(c, "datatype");
      k.value_class = expand_field(c, "value_class");
      shape.constraints.push_back(std::move(k));
    }
    out.push_back(std::move(shape));
  }
  return out;
}

std::vector<Violation> validate(const TripleStore& store, const std::vector<Shape>& shapes) {
  std::vector<Violation> out;
  const Term type = Term::iri(rdf_type());
  for (const auto& shape : shapes) {
    for (const Term& focus : instances_of(store, shape.target_class)) {
      for (std::size_t ci = 0; ci < shape.constraints.size(); ++ci) {
        const Constraint& c = shape.constraints[ci];
        std::vector<Term> values;
        for (const auto& p : c.path) {
          for (const auto& t : store.match(focus, Term::iri(p), std::nullopt)) values.push_back(t.object);
        }
        const std::string path = c.path.size() == 1 ? c.path[0] : "one of " + std::to_string(c.path.size()) + " paths";
        auto report = [&](ViolationKind kind, std::string message) {
          out.push_back({focus.value(), shape.id, ci, kind, std::move(message)});
        };
        const int n = static_cast<int>(values.size());
        if (n < c.min_count) {
          report(ViolationKind::MinCount, std::to_string(n) + " values for " + path + ", need at least " +
                                              std::to_string(c.min_count));
        }
        if (c.max_count && n > *c.max_count) {
          report(ViolationKind::MaxCount, std::to_string(n) + " values for " + path + ", allowed at most " +
                                              std::to_string(*c.max_count));
        }
        for (const auto& v : values) {
          if (!c.datatype.empty() && (!v.is_literal() || v.datatype() != c.datatype)) {
            report(ViolationKind::Datatype, v.ntriples() + " on " + path + " is not a <" + c.datatype + "> literal");
          }
          if (!c.value_class.empty()) {
            bool ok = false;
            if (!v.is_literal()) {
              for (const auto& cls : subclasses(store, c.value_class)) {
                if (store.contains({v, type, Term::iri(cls)})) {
                  ok = true;
                  break;
                }
              }
            }
            if (!ok) report(ViolationKind::ValueClass, v.ntriples() + " on " + path + " is not a <" + c.value_class + ">");
          }
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const Violation& a, const Violation& b) {
    return std::tie(a.focus, a.shape, a.constraint, a.kind, a.message) <
           std::tie(b.focus, b.shape, b.constraint, b.kind, b.message);
  });
  return out;
}

json report_json(const std::vector<Violation>& vs) {
  json j;
  j["conforms"] = vs.empty();
  j["violations"] = json::array();
  for (const auto& v : vs) {
    j["violations"].push_back({{"focus", v.focus},
                               {"shape", v.shape},
                               {"constraint", v.constraint},
                               {"kind", std::string(to_string(v.kind))},
                               {"message", v.message}});
  }
  return j;
}

std::string report_text(const std::vector<Violation>& vs) {
  std::string out;
  for (const auto& v : vs) {
    out += "<" + v.focus + "> " + v.shape + "[" + std::to_string(v.constraint) + "] " + std::string(to_string(v.kind)) +
           ": " + v.message + "\n";
  }
  out += std::to_string(vs.size()) + (vs.size() == 1 ? " violation\n" : " violations\n");
  return out;
}

}  // namespace kwg::validate
