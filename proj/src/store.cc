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

#include "vulnexp/store.h"

#include <sqlite3.h>

#include <cstdio>

namespace vulnexp {

namespace {

// Finalizes the statement on scope exit.
class Statement {
 public:
  Statement(sqlite3* db, const char* sql) {
    if (sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr) != SQLITE_OK) {
      throw StoreError(std::string("store: prepare failed: ") + sqlite3_errmsg(db));
    }
  }
  ~Statement() { sqlite3_finalize(stmt_); }
  Statement(const Statement&) = delete;
  Statement& operator=(const Statement&) = delete;

  void Bind(int index, std::string_view text) {
    sqlite3_bind_text(stmt_, index, text.data(), static_cast<int>(text.size()),
                      SQLITE_TRANSIENT);
  }
  int Step() { return sqlite3_step(stmt_); }
  std::string Column(int index) const {
    const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(stmt_, index));
    return p == nullptr ? std::string()
                        : std::string(p, static_cast<size_t>(
                                             sqlite3_column_bytes(stmt_, index)));
  }
  int64_t ColumnInt(int index) const { return sqlite3_column_int64(stmt_, index); }

 private:
  sqlite3_stmt* stmt_ = nullptr;
};

std::string EscapeLike(std::string_view prefix) {
  std::string out;
  for (char c : prefix) {
    if (c == '%' || c == '_' || c == '\\') out += '\\';
    out += c;
  }
  return out + "%";
}

}  // namespace

std::string_view NamespaceName(Namespace ns) {
  switch (ns) {
    case Namespace::kExplanations: return "explanations";
    case Namespace::kFeedback: return "feedback";
    case Namespace::kScans: return "scans";
    case Namespace::kFindings: return "findings";
  }
  return "unknown";
}

std::unique_ptr<Store> Store::Open(const std::filesystem::path& path) {
  if (path != ":memory:" && path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) {
      throw StoreError("store: cannot create directory for " +
                       path.filename().string() + ": " + ec.message());
    }
  }
  sqlite3* db = nullptr;
  const int flags = SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE |
                    SQLITE_OPEN_FULLMUTEX;
  if (sqlite3_open_v2(path.c_str(), &db, flags, nullptr) != SQLITE_OK) {
    std::string msg = db != nullptr ? sqlite3_errmsg(db) : "out of memory";
    sqlite3_close(db);
    throw StoreError("store: cannot open " + path.filename().string() + ": " + msg);
  }
  std::unique_ptr<Store> store(new Store(db, path));
  store->Exec(
      "CREATE TABLE IF NOT EXISTS kv ("
      "  seq INTEGER PRIMARY KEY AUTOINCREMENT,"
      "  ns TEXT NOT NULL,"
      "  key TEXT NOT NULL,"
      "  value TEXT NOT NULL,"
      "  UNIQUE(ns, key))");
  sqlite3_busy_timeout(db, 5000);
  return store;
}

Store::Store(sqlite3* db, std::filesystem::path path)
    : db_(db), path_(std::move(path)) {}

Store::~Store() { sqlite3_close(db_); }

void Store::Exec(const char* sql) const {
  char* err = nullptr;
  if (sqlite3_exec(db_, sql, nullptr, nullptr, &err) != SQLITE_OK) {
    std::string msg = err != nullptr ? err : "unknown error";
    sqlite3_free(err);
    throw StoreError("store: " + msg);
  }
}

void Store::Put(Namespace ns, std::string_view key, const nlohmann::json& value) {
  std::lock_guard lock(mu_);
  Statement st(db_,
               "INSERT INTO kv(ns, key, value) VALUES(?1, ?2, ?3) "
               "ON CONFLICT(ns, key) DO UPDATE SET value = excluded.value");
  st.Bind(1, NamespaceName(ns));
  st.Bind(2, key);
  st.Bind(3, value.dump());
  if (st.Step() != SQLITE_DONE) {
    throw StoreError(std::string("store: write failed: ") + sqlite3_errmsg(db_));
  }
}

std::optional<nlohmann::json> Store::Get(Namespace ns, std::string_view key) const {
  Statement st(db_, "SELECT value FROM kv WHERE ns = ?1 AND key = ?2");
  st.Bind(1, NamespaceName(ns));
  st.Bind(2, key);
  if (st.Step() != SQLITE_ROW) return std::nullopt;
  return nlohmann::json::parse(st.Column(0));
}

std::vector<std::pair<std::string, nlohmann::json>> Store::List(
    Namespace ns, std::string_view key_prefix) const {
  Statement st(db_,
               "SELECT key, value FROM kv WHERE ns = ?1 AND key LIKE ?2 "
               "ESCAPE '\\' ORDER BY seq");
  st.Bind(1, NamespaceName(ns));
  st.Bind(2, EscapeLike(key_prefix));
  std::vector<std::pair<std::string, nlohmann::json>> out;
  while (st.Step() == SQLITE_ROW) {
    std::string key = st.Column(0);
    // LIKE is case-insensitive for ASCII; keys are exact.
    if (key.compare(0, key_prefix.size(), key_prefix) != 0) continue;
    out.emplace_back(std::move(key), nlohmann::json::parse(st.Column(1)));
  }
  return out;
}

size_t Store::Count(Namespace ns) const {
  Statement st(db_, "SELECT COUNT(*) FROM kv WHERE ns = ?1");
  st.Bind(1, NamespaceName(ns));
  st.Step();
  return static_cast<size_t>(st.ColumnInt(0));
}

std::string Store::Append(Namespace ns, const nlohmann::json& value) {
  std::lock_guard lock(mu_);
  Exec("BEGIN IMMEDIATE");
  try {
    Statement count(db_, "SELECT COUNT(*) FROM kv WHERE ns = ?1");
    count.Bind(1, NamespaceName(ns));
    count.Step();
    char key[32];
    std::snprintf(key, sizeof(key), "%06lld",
                  static_cast<long long>(count.ColumnInt(0) + 1));
    Statement st(db_, "INSERT INTO kv(ns, key, value) VALUES(?1, ?2, ?3)");
    st.Bind(1, NamespaceName(ns));
    st.Bind(2, key);
    st.Bind(3, value.dump());
    if (st.Step() != SQLITE_DONE) {
      throw StoreError(std::string("store: append failed: ") + sqlite3_errmsg(db_));
    }
    Exec("COMMIT");
    return key;
  } catch (...) {
    Exec("ROLLBACK");
    throw;
  }
}

}  // namespace vulnexp
