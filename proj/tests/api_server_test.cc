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

#include <thread>

#include "gtest/gtest.h"
#include "httplib.h"
#include "support/fixtures.h"
#include "vulnexp/gateway.h"

namespace vulnexp {
namespace {

using nlohmann::json;

// A server on an ephemeral loopback port, stopped on destruction.
class RunningServer {
 public:
  RunningServer(Workbench* workbench, ApiServerOptions options = {})
      : server_(workbench, std::move(options)) {
    port_ = server_.BindToAnyPort("127.0.0.1");
    thread_ = std::thread([this] { server_.ListenAfterBind(); });
    server_.WaitUntilReady();
  }
  ~RunningServer() {
    server_.Stop();
    thread_.join();
  }

  httplib::Client Client() const { return httplib::Client("127.0.0.1", port_); }

 private:
  ApiServer server_;
  int port_ = 0;
  std::thread thread_;
};

json Body(const httplib::Result& r) { return json::parse(r->body); }

void ExpectNoHostPaths(const std::string& body) {
  EXPECT_EQ(body.find(testing::FixtureDir().string()), std::string::npos) << body;
  EXPECT_EQ(body.find("/root/"), std::string::npos) << body;
  EXPECT_EQ(body.find("/tmp/"), std::string::npos) << body;
}

class ApiServerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    store_ = Store::Open(":memory:");
    auto gateway = std::make_shared<LlmGateway>(
        ReplayProvider::FromFile(testing::FixturePath("transcripts/explanations.json")));
    workbench_ = std::make_unique<Workbench>(*store_, testing::FixtureCatalogs(), gateway);
    server_ = std::make_unique<RunningServer>(workbench_.get(),
                                              ApiServerOptions{"replay", {}});
  }

  // Imports a fixture through the API and returns the scan record.
  json Upload(const std::string& rel) {
    auto cli = server_->Client();
    httplib::Params params{{"source_root", testing::FixtureDir().string()}};
    auto r = cli.Post("/scans?" + httplib::detail::params_to_query_str(params),
                      testing::ReadFixture(rel), "application/json");
    EXPECT_TRUE(r);
    EXPECT_EQ(r->status, 201) << r->body;
    return Body(r);
  }

  std::string Fingerprint(const std::string& name) {
    return testing::NamedFindings().at(name).fingerprint;
  }

  std::unique_ptr<Store> store_;
  std::unique_ptr<Workbench> workbench_;
  std::unique_ptr<RunningServer> server_;
};

TEST_F(ApiServerTest, HealthReportsModeAndVersion) {
  auto r = server_->Client().Get("/health");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(Body(r)["status"], "ok");
  EXPECT_EQ(Body(r)["provider_mode"], "replay");
  EXPECT_TRUE(Body(r)["version"].is_string());
}

TEST_F(ApiServerTest, ImportMinimalScan) {
  const json scan = Upload("minimal.sarif");
  EXPECT_EQ(scan["finding_count"], 1);
  EXPECT_EQ(scan["scan_id"], "scan-1");
  auto list = server_->Client().Get("/scans");
  ASSERT_TRUE(list);
  EXPECT_EQ(Body(list).size(), 1u);
}

TEST_F(ApiServerTest, ImportMultipartUpload) {
  httplib::MultipartFormDataItems items = {
      {"sarif", testing::ReadFixture("minimal.sarif"), "/home/u/scan.sarif", "application/json"},
      {"source_root", testing::FixtureDir().string(), "", ""}};
  auto r = server_->Client().Post("/scans", items);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 201) << r->body;
  EXPECT_EQ(Body(r)["sarif_path"], "scan.sarif");
}

TEST_F(ApiServerTest, EmptyScanHasNoFindings) {
  const json scan = Upload("empty.sarif");
  EXPECT_EQ(scan["finding_count"], 0);
  auto r = server_->Client().Get("/scans/" + scan["scan_id"].get<std::string>() + "/findings");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_TRUE(Body(r)["groups"].empty());
}

TEST_F(ApiServerTest, RejectsBadDocuments) {
  auto cli = server_->Client();
  auto bad = cli.Post("/scans", testing::ReadFixture("malformed.sarif"), "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
  ExpectNoHostPaths(bad->body);

  auto version = cli.Post("/scans", testing::ReadFixture("unsupported_version.sarif"),
                          "application/json");
  ASSERT_TRUE(version);
  EXPECT_EQ(version->status, 422);

  auto empty = cli.Post("/scans", "", "application/json");
  ASSERT_TRUE(empty);
  EXPECT_EQ(empty->status, 400);
  EXPECT_EQ(Body(empty)["error"], "MissingSarif");

  auto root = cli.Post("/scans?source_root=/definitely/not/here",
                       testing::ReadFixture("minimal.sarif"), "application/json");
  ASSERT_TRUE(root);
  EXPECT_EQ(root->status, 400);
  EXPECT_EQ(Body(root)["error"], "InvalidSourceRoot");
  ExpectNoHostPaths(root->body);
}

TEST_F(ApiServerTest, GroupsFindingsByRuleAndFile) {
  const std::string id = Upload("flows.sarif")["scan_id"];
  auto cli = server_->Client();
  auto by_rule = cli.Get("/scans/" + id + "/findings?group=rule");
  ASSERT_TRUE(by_rule);
  ASSERT_EQ(by_rule->status, 200);
  const json groups = Body(by_rule)["groups"];
  ASSERT_EQ(groups.size(), 2u);
  size_t leaves = 0;
  for (const json& g : groups) {
    EXPECT_EQ(g["count"], g["findings"].size());
    leaves += g["findings"].size();
  }
  EXPECT_EQ(leaves, 3u);

  auto by_default = cli.Get("/scans/" + id + "/findings");
  ASSERT_TRUE(by_default);
  EXPECT_EQ(Body(by_default)["group"], "rule");

  auto by_file = cli.Get("/scans/" + id + "/findings?group=file");
  ASSERT_TRUE(by_file);
  EXPECT_EQ(Body(by_file)["group"], "file");

  auto invalid = cli.Get("/scans/" + id + "/findings?group=severity");
  ASSERT_TRUE(invalid);
  EXPECT_EQ(invalid->status, 422);
}

TEST_F(ApiServerTest, UnknownResourcesAre404) {
  auto cli = server_->Client();
  for (const std::string path : {"/scans/scan-99/findings", "/findings/deadbeef",
                                 "/findings/deadbeef/explanations"}) {
    auto r = cli.Get(path);
    ASSERT_TRUE(r) << path;
    EXPECT_EQ(r->status, 404) << path;
    ExpectNoHostPaths(r->body);
  }
  auto explain = cli.Post("/findings/deadbeef/explanation", "{}", "application/json");
  ASSERT_TRUE(explain);
  EXPECT_EQ(explain->status, 404);
  auto feedback = cli.Post("/findings/deadbeef/feedback", R"({"thumbs": "up"})",
                           "application/json");
  ASSERT_TRUE(feedback);
  EXPECT_EQ(feedback->status, 404);
}

TEST_F(ApiServerTest, FindingDetail) {
  Upload("flows.sarif");
  auto r = server_->Client().Get("/findings/" + Fingerprint("xss"));
  ASSERT_TRUE(r);
  ASSERT_EQ(r->status, 200);
  EXPECT_EQ(Body(r)["rule_id"], "java/xss");
}

TEST_F(ApiServerTest, ExplanationCachesAcrossRequests) {
  Upload("flows.sarif");
  auto cli = server_->Client();
  const std::string path = "/findings/" + Fingerprint("xss") + "/explanation";
  auto first = cli.Post(path, R"({"level": "beginner"})", "application/json");
  ASSERT_TRUE(first);
  ASSERT_EQ(first->status, 200) << first->body;
  EXPECT_EQ(first->get_header_value("X-Cache"), "miss");
  EXPECT_FALSE(Body(first)["cause"].get<std::string>().empty());
  EXPECT_EQ(Body(first)["level"], "beginner");

  // An empty body defaults to the beginner level and hits the cache.
  auto second = cli.Post(path, "", "application/json");
  ASSERT_TRUE(second);
  EXPECT_EQ(second->get_header_value("X-Cache"), "hit");
  EXPECT_EQ(Body(second), Body(first));

  auto listed = cli.Get("/findings/" + Fingerprint("xss") + "/explanations");
  ASSERT_TRUE(listed);
  EXPECT_EQ(Body(listed).size(), 1u);
}

TEST_F(ApiServerTest, ExplanationRequestValidation) {
  Upload("flows.sarif");
  auto cli = server_->Client();
  const std::string path = "/findings/" + Fingerprint("xss") + "/explanation";
  auto level = cli.Post(path, R"({"level": "expert"})", "application/json");
  ASSERT_TRUE(level);
  EXPECT_EQ(level->status, 422);
  EXPECT_EQ(Body(level)["error"], "InvalidLevel");
  auto flag = cli.Post(path, R"({"validate": "yes"})", "application/json");
  ASSERT_TRUE(flag);
  EXPECT_EQ(flag->status, 422);
  auto junk = cli.Post(path, "{not json", "application/json");
  ASSERT_TRUE(junk);
  EXPECT_EQ(junk->status, 400);
  EXPECT_EQ(Body(junk)["error"], "MalformedJson");
}

TEST_F(ApiServerTest, FeedbackRoundTripsIntoSummary) {
  Upload("flows.sarif");
  auto cli = server_->Client();
  const std::string fp = Fingerprint("xss");
  ASSERT_EQ(cli.Post("/findings/" + fp + "/explanation", "{}", "application/json")->status, 200);

  auto ok = cli.Post("/findings/" + fp + "/feedback", R"({
      "thumbs": "up", "comment": "clear",
      "criteria": {"Relevant": 5, "Faithful": 4, "Concise": 3, "Coherent": 4, "Accuracy": 5}})",
                     "application/json");
  ASSERT_TRUE(ok);
  EXPECT_EQ(ok->status, 201) << ok->body;
  EXPECT_EQ(Body(ok)["id"], "000001");

  auto partial = cli.Post("/findings/" + fp + "/feedback",
                          R"({"thumbs": "up", "criteria": {"Relevant": 5}})", "application/json");
  ASSERT_TRUE(partial);
  EXPECT_EQ(partial->status, 422);
  auto thumbs = cli.Post("/findings/" + fp + "/feedback", R"({"thumbs": "sideways"})",
                         "application/json");
  ASSERT_TRUE(thumbs);
  EXPECT_EQ(thumbs->status, 422);

  auto summary = cli.Get("/feedback/summary?level=beginner");
  ASSERT_TRUE(summary);
  ASSERT_EQ(summary->status, 200);
  EXPECT_FALSE(Body(summary).empty());
  auto bad = cli.Get("/feedback/summary?level=guru");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 422);
}

TEST_F(ApiServerTest, FeedbackWithoutExplanationIsRejected) {
  Upload("flows.sarif");
  auto r = server_->Client().Post("/findings/" + Fingerprint("sqli") + "/feedback",
                                  R"({"thumbs": "down"})", "application/json");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 404);
}

TEST(ApiServerNoStoreTest, EveryEndpointAnswers503) {
  RunningServer server(nullptr, ApiServerOptions{"none", {}});
  auto cli = server.Client();
  for (const std::string path : {"/health", "/scans", "/scans/scan-1/findings",
                                 "/findings/x", "/findings/x/explanations", "/feedback/summary"}) {
    auto r = cli.Get(path);
    ASSERT_TRUE(r) << path;
    EXPECT_EQ(r->status, 503) << path;
  }
  for (const std::string path : {"/scans", "/findings/x/explanation", "/findings/x/feedback"}) {
    auto r = cli.Post(path, "{}", "application/json");
    ASSERT_TRUE(r) << path;
    EXPECT_EQ(r->status, 503) << path;
  }
}

TEST(ApiServerNoProviderTest, ExplainWithoutProviderIs503) {
  auto store = Store::Open(":memory:");
  Workbench workbench(*store, testing::FixtureCatalogs(), nullptr);
  workbench.ImportScan(testing::ReadFixture("minimal.sarif"), "minimal.sarif",
                       testing::FixtureDir());
  RunningServer server(&workbench);
  const std::string fp = testing::NamedFindings().at("writer").fingerprint;
  auto r = server.Client().Post("/findings/" + fp + "/explanation", "{}", "application/json");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 503);
  EXPECT_EQ(Body(r)["error"], "NotConfigured");
}

TEST(OpenApiTest, CheckedInDocumentMatches) {
  const json doc = OpenApiDocument();
  EXPECT_EQ(doc["openapi"].get<std::string>().substr(0, 2), "3.");
  for (const char* path : {"/health", "/scans", "/scans/{scan_id}/findings",
                           "/findings/{fingerprint}", "/findings/{fingerprint}/explanation",
                           "/findings/{fingerprint}/explanations",
                           "/findings/{fingerprint}/feedback", "/feedback/summary"}) {
    EXPECT_TRUE(doc["paths"].contains(path)) << path;
  }
  auto text = ReadFileBytes(std::filesystem::path(VULNEXP_FIXTURE_DIR) / "../../docs/openapi.json");
  ASSERT_TRUE(text) << "docs/openapi.json is missing; run vulnexp openapi --out docs/openapi.json";
  EXPECT_EQ(json::parse(*text), doc);
}

}  // namespace
}  // namespace vulnexp
