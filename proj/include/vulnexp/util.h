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

#ifndef VULNEXP_UTIL_H_
#define VULNEXP_UTIL_H_

#include <chrono>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vulnexp {

// Lowercase hex SHA-256 of `data`.
std::string Sha256Hex(std::string_view data);

// Replaces invalid UTF-8 sequences with U+FFFD.
std::string SanitizeUtf8(std::string_view bytes);

// Whole-file read. Returns nullopt when the file cannot be opened.
std::optional<std::string> ReadFileBytes(const std::filesystem::path& path);

// Splits on '\n'; a trailing '\r' on each line is dropped. A final newline
// does not produce an empty trailing line.
std::vector<std::string> SplitLines(std::string_view text);

std::string_view Trim(std::string_view s);
std::string ToLower(std::string_view s);

using Clock = std::function<std::chrono::system_clock::time_point()>;
Clock SystemClock();

// "2026-10-15T08:30:00Z"
std::string FormatIsoUtc(std::chrono::system_clock::time_point t);
std::optional<std::chrono::system_clock::time_point> ParseIsoUtc(
    std::string_view text);

}  // namespace vulnexp

#endif  // VULNEXP_UTIL_H_
