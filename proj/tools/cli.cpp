#include "kwg/cli.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>

#include "kwg/error.hpp"
#include "kwg/ingest.hpp"
#include "kwg/pipeline.hpp"
#include "kwg/query.hpp"
#include "kwg/rdf.hpp"
#include "kwg/service.hpp"
#include "kwg/store.hpp"
#include "kwg/validate.hpp"

namespace kwg::cli {

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  return std::string(v);
}

int parse_int_env(const char* name, const std::string& v) {
  try {
    std::size_t used = 0;
    const int n = std::stoi(v, &used);
    if (used == v.size()) return n;
  } catch (const std::logic_error&) {
  }
  throw UsageError(std::string(name) + " must be an integer, got '" + v + "'");
}

// Raw flag values; empty optionals fall back to env, then to the config file.
struct Flags {
  std::optional<std::string> config, out, graph, format, shapes;
  std::optional<int> level, port;
  std::string results;  // empty: json for query, tsv for demo
  std::string query_file;
};

struct Settings {
  std::optional<pipeline::RunConfig> run;
  std::optional<int> level;
  std::optional<fs::path> out;
  std::optional<fs::path> graph;
  std::optional<fs::path> shapes;
  int port = 8080;
  std::string format = "nt";
};

Settings resolve(const Flags& f, const char* default_config = nullptr) {
  Settings s;
  std::optional<std::string> cfg = f.config ? f.config : env("KWG_CONFIG");
  if (!cfg && default_config) cfg = default_config;
  if (cfg) s.run = pipeline::load_run_config(*cfg);

  if (f.level) {
    s.level = *f.level;
  } else if (auto e = env("KWG_LEVEL")) {
    s.level = parse_int_env("KWG_LEVEL", *e);
  }
  if (s.level && (*s.level < 0 || *s.level > 30)) throw UsageError("level must be in 0..30");
  if (s.run) s.run->level_override = s.level;

  if (f.port) {
    s.port = *f.port;
  } else if (auto e = env("KWG_PORT")) {
    s.port = parse_int_env("KWG_PORT", *e);
  } else if (s.run) {
    s.port = s.run->port;
  }

  if (f.out) s.out = *f.out;
  else if (auto e = env("KWG_OUT")) s.out = *e;

  if (f.graph) s.graph = *f.graph;
  else if (auto e = env("KWG_GRAPH")) s.graph = *e;
  else if (s.run && !s.run->graph.empty()) s.graph = s.run->graph;

  if (f.shapes) s.shapes = *f.shapes;
  else if (auto e = env("KWG_SHAPES")) s.shapes = *e;
  else if (s.run && !s.run->shapes.empty()) s.shapes = s.run->shapes;

  if (f.format) s.format = *f.format;
  else if (auto e = env("KWG_FORMAT")) s.format = *e;
  if (s.format != "nt" && s.format != "ttl") throw UsageError("format must be nt or ttl");
  return s;
}

const pipeline::RunConfig& need_config(const Settings& s) {
  if (!s.run) throw UsageError("no run config; pass --config or set KWG_CONFIG");
  return *s.run;
}

fs::path need_graph(const Settings& s) {
  if (!s.graph) throw UsageError("no graph file; pass --graph, set KWG_GRAPH or name one in the run config");
  if (!fs::exists(*s.graph)) throw UsageError("graph file not found: " + s.graph->string());
  return *s.graph;
}

std::vector<Triple> read_graph(const fs::path& p) { return rdf::parse_ntriples(ingest::read_file(p)); }

// The graph named by --graph/KWG_GRAPH/config if the file exists, else one
// built from the run config.
std::vector<Triple> input_graph(const Settings& s) {
  if (s.graph && fs::exists(*s.graph)) return read_graph(*s.graph);
  if (s.run) return pipeline::build_graph(*s.run);
  return read_graph(need_graph(s));
}

std::string serialize(const std::vector<Triple>& g, const std::string& format) {
  return format == "ttl" ? rdf::serialize_turtle(g) : rdf::serialize_ntriples(g);
}

void write_output(const std::optional<fs::path>& path, const std::string& text, std::ostream& out) {
  if (!path) {
    out << text;
    return;
  }
  std::ofstream f(*path, std::ios::binary);
  if (!f) throw UsageError("cannot write " + path->string());
  f << text;
  if (!f) throw Error(ErrorKind::Data, "write failed: " + path->string());
}

std::shared_ptr<const TripleStore> to_store(const std::vector<Triple>& g) {
  auto st = std::make_shared<TripleStore>();
  st->bulk_load(g);
  return st;
}

std::string read_query_text(const std::string& file) {
  if (file.empty() || file == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  }
  if (!fs::exists(file)) throw UsageError("query file not found: " + file);
  return ingest::read_file(file);
}

int report_violations(const TripleStore& st, const fs::path& shapes_path, std::ostream& out, bool json) {
  const auto shapes = validate::parse_shapes(ingest::read_json(shapes_path));
  const auto v = validate::validate(st, shapes);
  if (json) out << validate::report_json(v).dump(2) << "\n";
  else out << validate::report_text(v);
  if (!v.empty()) throw ValidationFailed(std::to_string(v.size()) + " violation(s)");
  return kOk;
}

service::HttpServer* g_server = nullptr;
extern "C" void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Geospatial knowledge graph pipeline", "kwg"};
  app.require_subcommand(1);
  Flags f;

  auto common = [&f](CLI::App* c) {
    c->add_option("--config", f.config, "run config (JSON)");
    c->add_option("--level", f.level, "integration level override");
    c->add_option("--out", f.out, "output file (default stdout)");
    c->add_option("--graph", f.graph, "N-Triples graph file");
    c->add_option("--port", f.port, "HTTP port");
    c->add_option("--format", f.format, "graph output format")->check(CLI::IsMember({"nt", "ttl"}));
    c->add_option("--shapes", f.shapes, "shapes file (JSON)");
  };

  auto* ingest_cmd = app.add_subcommand("ingest", "map the configured datasets to triples");
  auto* relate_cmd = app.add_subcommand("relate", "add cell features and spatial relations to a graph");
  auto* export_cmd = app.add_subcommand("export", "write the full graph as N-Triples or Turtle");
  auto* load_cmd = app.add_subcommand("load", "load a graph file and report its size");
  auto* query_cmd = app.add_subcommand("query", "run a query file (or stdin) against a graph");
  auto* validate_cmd = app.add_subcommand("validate", "check a graph against shapes");
  auto* serve_cmd = app.add_subcommand("serve", "serve the HTTP API");
  auto* demo_cmd = app.add_subcommand("demo", "build the bundled fixture and answer its query");
  for (auto* c : {ingest_cmd, relate_cmd, export_cmd, load_cmd, query_cmd, validate_cmd, serve_cmd, demo_cmd}) common(c);
  query_cmd->add_option("file", f.query_file, "query file, '-' for stdin");
  bool json_report = false;
  validate_cmd->add_flag("--json", json_report, "JSON report");
  for (auto* c : {query_cmd, demo_cmd}) {
    c->add_option("--results", f.results, "result format")->check(CLI::IsMember({"json", "tsv"}));
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "kwg: " << e.what() << "\n" << app.help();
    return kUsage;
  }

  try {
    if (ingest_cmd->parsed()) {
      const Settings s = resolve(f);
      const auto ingested = pipeline::ingest_run(need_config(s));
      write_output(s.out, serialize(ingested.triples, s.format), out);
    } else if (relate_cmd->parsed()) {
      const Settings s = resolve(f);
      std::vector<std::string> skipped;
      std::vector<Triple> g;
      if (f.graph || env("KWG_GRAPH")) {
        g = read_graph(need_graph(s));
        const int level = s.level.value_or(s.run ? s.run->level : 13);
        g = pipeline::merge(std::move(g), pipeline::relate_graph(g, level, &skipped));
      } else {
        g = pipeline::build_graph(need_config(s), &skipped);
      }
      for (const auto& k : skipped) err << "kwg: skipped " << k << " (crosses the antimeridian)\n";
      write_output(s.out, serialize(g, s.format), out);
    } else if (export_cmd->parsed()) {
      const Settings s = resolve(f);
      std::vector<Triple> g = (f.graph || env("KWG_GRAPH")) ? read_graph(need_graph(s))
                                                             : pipeline::build_graph(need_config(s));
      write_output(s.out ? s.out : (s.run && !s.run->graph.empty() ? std::optional<fs::path>(s.run->graph) : std::nullopt),
                   serialize(g, s.format), out);
    } else if (load_cmd->parsed()) {
      const Settings s = resolve(f);
      TripleStore st;
      const auto n = st.load_ntriples_file(need_graph(s));
      out << "loaded " << n << " triples, " << st.size() << " distinct\n";
      if (s.out) st.save_ntriples_file(*s.out);
    } else if (query_cmd->parsed()) {
      const std::string text = read_query_text(f.query_file);
      const Settings s = resolve(f);
      const auto st = to_store(input_graph(s));
      const auto r = query::run(text, *st);
      out << (f.results == "tsv" ? query::to_tsv(r) : query::to_json(r) + "\n");
    } else if (validate_cmd->parsed()) {
      const Settings s = resolve(f);
      if (!s.shapes) throw UsageError("no shapes file; pass --shapes, set KWG_SHAPES or name one in the run config");
      const auto st = to_store(input_graph(s));
      return report_violations(*st, *s.shapes, out, json_report);
    } else if (serve_cmd->parsed()) {
      const Settings s = resolve(f);
      auto load = [s] { return to_store(input_graph(s)); };
      service::Service svc(load());
      service::HttpServer server(svc, load);
      const int port = server.bind("0.0.0.0", s.port);
      err << "kwg: serving " << svc.snapshot()->size() << " triples on port " << port << "\n";
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      server.listen();
      g_server = nullptr;
    } else if (demo_cmd->parsed()) {
      const Settings s = resolve(f, KWG_DATA_DIR "/louisiana/run.json");
      const auto st = to_store(pipeline::build_graph(need_config(s)));
      const auto r = query::run(ingest::read_file(KWG_DATA_DIR "/queries/vulnerability_by_cell.rq"), *st);
      out << (f.results == "json" ? query::to_json(r) + "\n" : query::to_tsv(r));
    }
    return kOk;
  } catch (const UsageError& e) {
    err << "kwg: " << e.what() << "\n";
    return kUsage;
  } catch (const ValidationFailed& e) {
    err << "kwg: validation failed: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const Error& e) {
    err << "kwg: " << e.what() << "\n";
    return (e.kind() == ErrorKind::NotFound || e.kind() == ErrorKind::InvalidArgument) ? kUsage : kDataError;
  } catch (const std::exception& e) {
    err << "kwg: " << e.what() << "\n";
    return kDataError;
  }
}

}  // namespace kwg::cli
