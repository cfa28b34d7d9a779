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

#ifndef REVLAB_TEXT_HPP_
#define REVLAB_TEXT_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace revlab::text {

// Whitespace-separated raw tokens, untouched.
std::vector<std::string_view> split_whitespace(std::string_view s);

// Lowercases ASCII letters; other bytes (including UTF-8 sequences) pass
// through unchanged.
std::string ascii_lower(std::string_view s);

// Removes ASCII punctuation from both ends of a token.
std::string_view strip_edge_punct(std::string_view token);

// Whitespace split, lowercase, edge punctuation stripped, empties dropped.
// This is the one tokenizer used for corpus statistics, lexical diversity and
// sentiment scoring.
std::vector<std::string> normalized_tokens(std::string_view s);

// Number of UTF-8 code points.
std::size_t utf8_length(std::string_view s);

}  // namespace revlab::text

#endif  // REVLAB_TEXT_HPP_
