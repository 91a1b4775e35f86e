#include <httplib.h>

#include <cstdlib>

#include "kwg/error.hpp"
#include "kwg/service.hpp"

namespace kwg::service {

struct HttpServer::Impl {
  Service& svc;
  Reloader reload;
  httplib::Server server;
  std::string origin;

  Impl(Service& s, Reloader r) : svc(s), reload(std::move(r)) {
    const char* env = std::getenv("KWG_CORS_ORIGIN");
    origin = env && *env ? env : svc.config().cors_origin;
    routes();
  }

  static Params params_of(const httplib::Request& req) {
    Params p;
    for (const auto& [k, v] : req.params) p.emplace(k, v);
    return p;
  }

  void send(httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  }

  void routes() {
    server.set_post_routing_handler([this](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Origin", origin);
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
    });
    server.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    server.Get("/health", [this](const httplib::Request&, httplib::Response& res) { send(res, svc.health()); });
    server.Get("/datasets", [this](const httplib::Request&, httplib::Response& res) { send(res, svc.datasets()); });
    server.Get("/briefing", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, svc.briefing(params_of(req)));
    });
    server.Get("/compare", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, svc.compare(params_of(req)));
    });
    server.Get("/cells", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, svc.cells(params_of(req)));
    });
    server.Post("/query", [this](const httplib::Request& req, httplib::Response& res) {
      // Raw query text, or a form field named "query".
      std::string text = req.body;
      if (req.has_param("query")) text = req.get_param_value("query");
      send(res, svc.query(text));
    });
    server.Post("/admin/reload", [this](const httplib::Request&, httplib::Response& res) {
      if (!reload) {
        send(res, {404, R"({"error":"reload not configured"})", "application/json"});
        return;
      }
      try {
        auto fresh = reload();
        const auto n = fresh->size();
        svc.swap(std::move(fresh));
        send(res, {200, nlohmann::json{{"status", "reloaded"}, {"triples", n}}.dump(), "application/json"});
      } catch (const std::exception& e) {
        send(res, {500, nlohmann::json{{"error", e.what()}}.dump(), "application/json"});
      }
    });
  }
};

HttpServer::HttpServer(Service& svc, Reloader reload) : impl_(std::make_unique<Impl>(svc, std::move(reload))) {}
HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error(ErrorKind::InvalidArgument, "cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace kwg::service
