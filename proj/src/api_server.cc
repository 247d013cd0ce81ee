// Copyright 2026 The vulnexp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vulnexp/api_server.h"

#include "httplib.h"
#include "vulnexp/assets.h"
#include "vulnexp/sarif.h"
#include "vulnexp/version.h"

namespace vulnexp {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void SendJson(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json; charset=utf-8");
}

void SendError(httplib::Response& res, int status, std::string_view code,
               std::string_view message) {
  SendJson(res, status, json{{"error", code}, {"message", message}});
}

std::optional<json> ParseBody(const httplib::Request& req, httplib::Response& res) {
  if (req.body.empty()) return json::object();
  try {
    json j = json::parse(req.body);
    if (j.is_object()) return j;
  } catch (const json::parse_error&) {
  }
  SendError(res, 400, "MalformedJson", "request body must be a JSON object");
  return std::nullopt;
}

std::optional<bool> OptionalBool(const json& body, const char* field) {
  if (!body.contains(field) || body[field].is_null()) return false;
  if (!body[field].is_boolean()) return std::nullopt;
  return body[field].get<bool>();
}

}  // namespace

struct ApiServer::Impl {
  Workbench* workbench;
  ApiServerOptions options;
  httplib::Server server;

  Impl(Workbench* wb, ApiServerOptions opts) : workbench(wb), options(std::move(opts)) {
    Routes();
  }

  bool Available(httplib::Response& res) {
    if (workbench != nullptr) return true;
    SendError(res, 503, "NoStore", "no persistence store is configured");
    return false;
  }

  void Routes() {
    server.set_exception_handler(
        [](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
          // Internal messages can carry host paths; keep them out of bodies.
          try {
            if (ep) std::rethrow_exception(ep);
          } catch (const StoreError&) {
            SendError(res, 503, "StoreUnavailable", "persistence store failed");
            return;
          } catch (...) {
          }
          SendError(res, 500, "Internal", "internal server error");
        });

    server.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
      if (workbench == nullptr) {
        SendJson(res, 503, json{{"status", "unavailable"},
                                {"version", kVersion},
                                {"provider_mode", options.provider_mode}});
        return;
      }
      SendJson(res, 200, json{{"status", "ok"},
                              {"version", kVersion},
                              {"provider_mode", options.provider_mode}});
    });

    server.Get("/scans", [this](const httplib::Request&, httplib::Response& res) {
      if (!Available(res)) return;
      SendJson(res, 200, json(workbench->ListScans()));
    });

    server.Post("/scans", [this](const httplib::Request& req, httplib::Response& res) {
      if (!Available(res)) return;
      PostScan(req, res);
    });

    server.Get(R"(/scans/([^/]+)/findings)",
               [this](const httplib::Request& req, httplib::Response& res) {
                 if (!Available(res)) return;
                 auto group = ParseGroupBy(req.get_param_value("group"));
                 if (!group) {
                   SendError(res, 422, "InvalidGroup", "group must be rule or file");
                   return;
                 }
                 try {
                   SendJson(res, 200, workbench->GroupedFindings(req.matches[1].str(), *group));
                 } catch (const NotFoundError& e) {
                   SendError(res, 404, "UnknownScan", e.what());
                 }
               });

    server.Get(R"(/findings/([^/]+))",
               [this](const httplib::Request& req, httplib::Response& res) {
                 if (!Available(res)) return;
                 auto finding = workbench->GetFinding(req.matches[1].str());
                 if (!finding) {
                   SendError(res, 404, "UnknownFinding", "unknown finding " + req.matches[1].str());
                   return;
                 }
                 SendJson(res, 200, json(*finding));
               });

    server.Get(R"(/findings/([^/]+)/explanations)",
               [this](const httplib::Request& req, httplib::Response& res) {
                 if (!Available(res)) return;
                 const std::string fp = req.matches[1].str();
                 if (!workbench->GetFinding(fp)) {
                   SendError(res, 404, "UnknownFinding", "unknown finding " + fp);
                   return;
                 }
                 SendJson(res, 200, json(workbench->explanations().ExplanationsFor(fp)));
               });

    server.Post(R"(/findings/([^/]+)/explanation)",
                [this](const httplib::Request& req, httplib::Response& res) {
                  if (!Available(res)) return;
                  PostExplanation(req, res);
                });

    server.Post(R"(/findings/([^/]+)/feedback)",
                [this](const httplib::Request& req, httplib::Response& res) {
                  if (!Available(res)) return;
                  PostFeedback(req, res);
                });

    server.Get("/feedback/summary", [this](const httplib::Request& req, httplib::Response& res) {
      if (!Available(res)) return;
      FeedbackFilter filter;
      if (req.has_param("level")) {
        filter.level = ParseExperienceLevel(req.get_param_value("level"));
        if (!filter.level) {
          SendError(res, 422, "InvalidLevel", "level must be beginner, intermediate, or advanced");
          return;
        }
      }
      if (req.has_param("fingerprint")) filter.finding_fingerprint = req.get_param_value("fingerprint");
      SendJson(res, 200, SummaryToJson(workbench->explanations().SummarizeFeedback(filter)));
    });

    if (!options.ui_dir.empty()) server.set_mount_point("/", options.ui_dir.string());
  }

  void PostScan(const httplib::Request& req, httplib::Response& res) {
    std::string sarif_text;
    std::string sarif_name = "upload.sarif";
    std::string source_root;
    if (req.is_multipart_form_data()) {
      if (!req.has_file("sarif")) {
        SendError(res, 400, "MissingSarif", "multipart field 'sarif' is required");
        return;
      }
      const auto file = req.get_file_value("sarif");
      sarif_text = file.content;
      if (!file.filename.empty()) sarif_name = fs::path(file.filename).filename().string();
      if (req.has_file("source_root")) source_root = req.get_file_value("source_root").content;
    } else {
      sarif_text = req.body;
      source_root = req.get_param_value("source_root");
    }
    if (sarif_text.empty()) {
      SendError(res, 400, "MissingSarif", "request carries no SARIF document");
      return;
    }
    if (!source_root.empty()) {
      std::error_code ec;
      if (!fs::is_directory(source_root, ec)) {
        SendError(res, 400, "InvalidSourceRoot", "source_root is not a readable directory");
        return;
      }
    }
    try {
      ScanRecord record = workbench->ImportScan(sarif_text, sarif_name, source_root);
      SendJson(res, 201, json(record));
    } catch (const SarifError& e) {
      const int status = e.kind() == SarifError::Kind::kUnsupportedVersion ? 422 : 400;
      SendError(res, status, SarifErrorKindName(e.kind()), e.what());
    }
  }

  void PostExplanation(const httplib::Request& req, httplib::Response& res) {
    const std::string fp = req.matches[1].str();
    auto body = ParseBody(req, res);
    if (!body) return;
    ExperienceLevel level = ExperienceLevel::kBeginner;
    if (body->contains("level")) {
      const json& l = (*body)["level"];
      auto parsed = l.is_string() ? ParseExperienceLevel(l.get<std::string>()) : std::nullopt;
      if (!parsed) {
        SendError(res, 422, "InvalidLevel", "level must be beginner, intermediate, or advanced");
        return;
      }
      level = *parsed;
    }
    auto validate = OptionalBool(*body, "validate");
    auto force = OptionalBool(*body, "force_refresh");
    if (!validate || !force) {
      SendError(res, 422, "InvalidRequest", "validate and force_refresh must be booleans");
      return;
    }
    try {
      ExplainResult result = workbench->Explain(fp, level, {*validate, *force});
      res.set_header("X-Cache", result.cache_hit ? "hit" : "miss");
      SendJson(res, 200, json(result.explanation));
    } catch (const NotFoundError& e) {
      SendError(res, 404, "UnknownFinding", e.what());
    } catch (const GatewayError& e) {
      if (e.kind() == GatewayError::Kind::kNotConfigured) {
        SendError(res, 503, "NotConfigured", "no LLM provider is configured");
      } else {
        SendError(res, 502, GatewayErrorKindName(e.kind()), e.what());
      }
    }
  }

  void PostFeedback(const httplib::Request& req, httplib::Response& res) {
    const std::string fp = req.matches[1].str();
    auto body = ParseBody(req, res);
    if (!body) return;
    json doc = *body;
    doc["finding_fingerprint"] = fp;
    if (!doc.contains("level")) doc["level"] = "beginner";
    doc.erase("created_at");
    Feedback feedback;
    try {
      feedback = doc.get<Feedback>();
    } catch (const FeedbackError& e) {
      SendError(res, 422, "InvalidFeedback", e.what());
      return;
    } catch (const json::exception&) {
      SendError(res, 422, "InvalidFeedback",
                "feedback needs thumbs (up or down), optional level, criteria, comment");
      return;
    }
    try {
      std::string id = workbench->RecordFeedback(std::move(feedback));
      SendJson(res, 201, json{{"id", id}, {"finding_fingerprint", fp}});
    } catch (const NotFoundError& e) {
      SendError(res, 404, "UnknownFinding", e.what());
    } catch (const FeedbackError& e) {
      if (e.kind() == FeedbackError::Kind::kUnknownFinding) {
        SendError(res, 404, "UnknownFinding", e.what());
      } else {
        SendError(res, 422, "InvalidFeedback", e.what());
      }
    }
  }
};

ApiServer::ApiServer(Workbench* workbench, ApiServerOptions options)
    : impl_(std::make_unique<Impl>(workbench, std::move(options))) {}

ApiServer::~ApiServer() = default;

bool ApiServer::Listen(const std::string& host, int port) {
  return impl_->server.listen(host, port);
}

int ApiServer::BindToAnyPort(const std::string& host) {
  return impl_->server.bind_to_any_port(host);
}

bool ApiServer::ListenAfterBind() { return impl_->server.listen_after_bind(); }

void ApiServer::WaitUntilReady() const { impl_->server.wait_until_ready(); }

void ApiServer::Stop() { impl_->server.stop(); }

json OpenApiDocument() {
  json doc = json::parse(assets::get("openapi.json"));
  doc["info"]["version"] = kVersion;
  return doc;
}

}  // namespace vulnexp
