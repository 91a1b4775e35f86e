#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "kwg/geometry.hpp"
#include "kwg/kgmodel.hpp"
#include "kwg/store.hpp"

namespace kwg::service {

struct Response {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

using Params = std::map<std::string, std::string>;

struct ServiceConfig {
  std::string cors_origin = "*";
  std::size_t max_cells = 2000;  // cap for /cells
};

/// A target for a briefing: a cell (by token) or another resource by IRI.
struct Target {
  std::string iri;
  std::optional<std::string> token;
};

/// Request handlers over an immutable store snapshot. Handlers never throw;
/// errors become 4xx responses with {"error": ...}.
class Service {
 public:
  explicit Service(std::shared_ptr<const TripleStore> store, ServiceConfig cfg = {});

  std::shared_ptr<const TripleStore> snapshot() const;
  /// Later requests see the new store; running requests keep theirs.
  void swap(std::shared_ptr<const TripleStore> store);
  const ServiceConfig& config() const { return cfg_; }

  Response query(std::string_view text) const;
  Response briefing(const Params& params) const;
  Response compare(const Params& params) const;
  Response cells(const Params& params) const;
  Response datasets() const;
  Response health() const;

 private:
  ServiceConfig cfg_;
  mutable std::mutex mutex_;
  std::shared_ptr<const TripleStore> store_;
};

/// Thrown by the briefing builders; carries the HTTP status.
class RequestError : public std::runtime_error {
 public:
  RequestError(int status, const std::string& message) : std::runtime_error(message), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

/// "cell" token, or "region" as a full IRI, <IRI>, prefix:local or bare
/// resource key. 400 on malformed input, 404 for an unknown region.
Target resolve_target(const TripleStore& store, const std::optional<std::string>& cell,
                      const std::optional<std::string>& region);
/// Either a cell token or a region reference.
Target resolve_any(const TripleStore& store, const std::string& ref);

/// Open ends are allowed; 400 when malformed or from > to.
std::optional<Interval> parse_window(const std::optional<std::string>& from, const std::optional<std::string>& to);

/// Features related to the target by stored kwg-ont spatial triples,
/// observations on the target and those features grouped by property,
/// three-hop provenance per property, and an empty experts list.
nlohmann::json build_briefing(const TripleStore& store, const Target& target, const std::optional<Interval>& window);
/// Both briefings plus a table of the observed properties they share.
nlohmann::json build_comparison(const TripleStore& store, const Target& a, const Target& b);
nlohmann::json cells_geojson(const BoundingBox& bbox, int level, std::size_t max_cells);
nlohmann::json dataset_listing(const TripleStore& store);

// Query-module formulations of the briefing sections. Running them over
// the same store reproduces the briefing without a time window.
std::string features_query(const std::string& target, SpatialPredicate p);
std::string simple_observations_query(const std::string& foi);
std::string quantity_observations_query(const std::string& foi);
std::string provenance_query(const std::string& property);

/// Predicates a briefing reports, strongest first.
const std::vector<SpatialPredicate>& briefing_predicates();

using Reloader = std::function<std::shared_ptr<const TripleStore>()>;

/// HTTP binding of a Service (GET /briefing, /compare, /cells, /datasets,
/// /health; POST /query, /admin/reload).
class HttpServer {
 public:
  explicit HttpServer(Service& svc, Reloader reload = {});
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Returns the bound port (pass 0 for any free port).
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace kwg::service
