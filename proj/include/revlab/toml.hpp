// Copyright 2026 The revlab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Reader for the subset of TOML used by experiment configs: bare and dotted
// keys, basic and literal strings, integers, floats, booleans, arrays, inline
// tables, [table] and [[array-of-tables]] headers. Dates and multi-line
// strings are not supported.

#ifndef REVLAB_TOML_HPP_
#define REVLAB_TOML_HPP_

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include <json.hpp>

namespace revlab {

// Throws ValidationError with "source:line: message".
nlohmann::json parse_toml(std::istream& in, std::string_view source_name = "<stream>");
nlohmann::json parse_toml(std::string_view text, std::string_view source_name = "<string>");
nlohmann::json load_toml(const std::filesystem::path& path);

}  // namespace revlab

#endif  // REVLAB_TOML_HPP_
