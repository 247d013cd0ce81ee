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

#ifndef VULNEXP_ASSETS_H_
#define VULNEXP_ASSETS_H_

#include <string_view>

// Files from data/ compiled into the library (templates, protected
// identifier list, default few-shot examples).
namespace vulnexp::assets {

// Throws std::out_of_range for unknown names.
std::string_view get(std::string_view name);
bool contains(std::string_view name);

}  // namespace vulnexp::assets

#endif  // VULNEXP_ASSETS_H_
