#pragma once

// HTTP + JSON front end of an annotation campaign.
//
//   GET  /task?annotator=<token>[&campaign=<id>]   next task, or {"done": true}
//   POST /annotations {annotator, sample_id, label} 201 / 400 / 404 / 409 / 410
//   GET  /progress                                  campaign snapshot
//   GET  /export                                    annotation file (TSV)
//
// Anything else is served from the optional static directory (the UI bundle).

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <thread>

#include "adoptrace/annotate/campaign.hpp"
#include "httplib.h"
#include "json.hpp"

namespace adoptrace::annotate {

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::optional<std::filesystem::path> static_dir;
  std::function<std::string()> clock = utc_now_iso;
};

class AnnotationServer {
 public:
  AnnotationServer(Campaign& campaign, ServerOptions options)
      : campaign_(campaign), options_(std::move(options)) {
    routes();
  }
  AnnotationServer(const AnnotationServer&) = delete;
  AnnotationServer& operator=(const AnnotationServer&) = delete;
  ~AnnotationServer() { stop(); }

  // Binds and serves on a background thread; returns the bound port.
  int start() {
    port_ = options_.port == 0 ? server_.bind_to_any_port(options_.host)
                               : (server_.bind_to_port(options_.host, options_.port)
                                      ? options_.port
                                      : -1);
    if (port_ < 0)
      throw IoError("cannot bind " + options_.host + ":" + std::to_string(options_.port));
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return port_;
  }

  // Binds and serves on the calling thread until stop() is called elsewhere.
  void run() {
    if (!server_.listen(options_.host, options_.port))
      throw IoError("cannot listen on " + options_.host + ":" + std::to_string(options_.port));
  }

  void stop() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  int port() const { return port_; }

 private:
  static void json_reply(httplib::Response& res, int status, const nlohmann::ordered_json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static void error_reply(httplib::Response& res, int status, const std::string& msg) {
    json_reply(res, status, {{"error", msg}});
  }

  bool campaign_matches(const httplib::Request& req, httplib::Response& res) const {
    if (req.has_param("campaign") && req.get_param_value("campaign") != campaign_.config().id) {
      error_reply(res, 404, "unknown campaign '" + req.get_param_value("campaign") + "'");
      return false;
    }
    return true;
  }

  void routes() {
    server_.set_default_headers({{"Access-Control-Allow-Origin", "*"}});

    server_.Get("/task", [this](const httplib::Request& req, httplib::Response& res) {
      if (!campaign_matches(req, res)) return;
      const auto annotator = req.get_param_value("annotator");
      if (annotator.empty()) return error_reply(res, 400, "missing 'annotator' parameter");
      const auto task = campaign_.next_task(annotator);
      if (!task) return json_reply(res, 200, {{"done", true}});
      auto body = task->to_json();
      body["done"] = false;
      json_reply(res, 200, body);
    });

    server_.Post("/annotations", [this](const httplib::Request& req, httplib::Response& res) {
      if (!campaign_matches(req, res)) return;
      const auto body = nlohmann::json::parse(req.body, nullptr, false);
      if (body.is_discarded() || !body.is_object())
        return error_reply(res, 400, "request body must be a JSON object");
      const auto field = [&](const char* k) -> std::string {
        const auto it = body.find(k);
        return it != body.end() && it->is_string() ? it->get<std::string>() : std::string();
      };
      const auto annotator = field("annotator"), sample = field("sample_id"),
                 label = field("label");
      if (annotator.empty() || sample.empty())
        return error_reply(res, 400, "'annotator' and 'sample_id' are required");
      const auto r = campaign_.submit(annotator, sample, label, options_.clock());
      switch (r.status) {
        case SubmitStatus::kAccepted:
          return json_reply(res, 201, {{"status", "accepted"}, {"annotations", r.total_annotations}});
        case SubmitStatus::kInvalidLabel:
          return error_reply(res, 400, "label must be positive, negative or neutral");
        case SubmitStatus::kUnknownSample:
          return error_reply(res, 404, "unknown sample '" + sample + "'");
        case SubmitStatus::kDuplicate:
          return error_reply(res, 409, "sample already labelled by this annotator");
        case SubmitStatus::kCapReached:
          return error_reply(res, 410, "sample has reached its annotation cap");
      }
    });

    server_.Get("/progress", [this](const httplib::Request& req, httplib::Response& res) {
      if (!campaign_matches(req, res)) return;
      auto j = campaign_.progress().to_json();
      j["campaign"] = campaign_.config().id;
      json_reply(res, 200, j);
    });

    server_.Get("/export", [this](const httplib::Request& req, httplib::Response& res) {
      if (!campaign_matches(req, res)) return;
      res.set_content(format_annotations(campaign_.annotations()), "text/tab-separated-values");
    });

    if (options_.static_dir) server_.set_mount_point("/", options_.static_dir->string());
  }

  Campaign& campaign_;
  ServerOptions options_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = -1;
};

}  // namespace adoptrace::annotate
