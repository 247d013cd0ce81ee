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

#ifndef VULNEXP_STORE_H_
#define VULNEXP_STORE_H_

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

struct sqlite3;

namespace vulnexp {

enum class Namespace { kExplanations, kFeedback, kScans, kFindings };

std::string_view NamespaceName(Namespace ns);

class StoreError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Single-file key-value store with JSON values, one keyspace per Namespace.
// Entries keep their first-insertion order. There is no delete operation.
// Writes are serialized; the object is safe to share across threads.
class Store {
 public:
  // ":memory:" opens a private in-memory store.
  static std::unique_ptr<Store> Open(const std::filesystem::path& path);
  ~Store();

  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  // Inserts or replaces; a replaced entry keeps its original position.
  void Put(Namespace ns, std::string_view key, const nlohmann::json& value);
  std::optional<nlohmann::json> Get(Namespace ns, std::string_view key) const;
  // Entries whose key starts with `key_prefix`, in insertion order.
  std::vector<std::pair<std::string, nlohmann::json>> List(
      Namespace ns, std::string_view key_prefix = {}) const;
  size_t Count(Namespace ns) const;
  // Stores under the next sequential key ("000001", "000002", ...) and
  // returns that key.
  std::string Append(Namespace ns, const nlohmann::json& value);

  const std::filesystem::path& path() const { return path_; }

 private:
  Store(sqlite3* db, std::filesystem::path path);
  void Exec(const char* sql) const;

  sqlite3* db_;
  std::filesystem::path path_;
  mutable std::mutex mu_;
};

}  // namespace vulnexp

#endif  // VULNEXP_STORE_H_
