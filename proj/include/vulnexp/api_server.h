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

#ifndef VULNEXP_API_SERVER_H_
#define VULNEXP_API_SERVER_H_

#include <filesystem>
#include <memory>
#include <string>

#include "json.hpp"
#include "vulnexp/workbench.h"

namespace vulnexp {

struct ApiServerOptions {
  std::string provider_mode = "none";
  std::filesystem::path ui_dir;  // mounted at "/" when non-empty
};

// HTTP/JSON front end over a Workbench. A null workbench (no store) makes
// every endpoint, including /health, answer 503.
class ApiServer {
 public:
  ApiServer(Workbench* workbench, ApiServerOptions options);
  ~ApiServer();

  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  // Blocks until Stop().
  bool Listen(const std::string& host, int port);
  // Binds an ephemeral port and returns it; serve with ListenAfterBind().
  int BindToAnyPort(const std::string& host);
  bool ListenAfterBind();
  void WaitUntilReady() const;
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// OpenAPI 3 description of the endpoints.
nlohmann::json OpenApiDocument();

}  // namespace vulnexp

#endif  // VULNEXP_API_SERVER_H_
