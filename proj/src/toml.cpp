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


#include "revlab/toml.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "revlab/error.hpp"

namespace revlab {
namespace {

using nlohmann::json;

class Parser {
 public:
  Parser(std::string_view text, std::string_view source) : s_(text), source_(source) {}

  json run() {
    json root = json::object();
    json* table = &root;
    while (true) {
      skip_blank_lines();
      if (at_end()) break;
      if (peek() == '[') {
        table = header(root);
      } else {
        key_value(*table);
      }
      end_of_line();
    }
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ValidationError(std::string(source_) + ":" + std::to_string(line_) + ": " + msg);
  }

  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return at_end() ? '\0' : s_[pos_]; }
  char take() {
    const char c = s_[pos_++];
    if (c == '\n') ++line_;
    return c;
  }

  void skip_spaces() {
    while (!at_end() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  void skip_comment() {
    if (peek() == '#') {
      while (!at_end() && peek() != '\n') ++pos_;
    }
  }

  // Whitespace, newlines and comments; used inside arrays and between lines.
  void skip_blank_lines() {
    while (!at_end()) {
      skip_spaces();
      skip_comment();
      if (peek() == '\n' || peek() == '\r') {
        take();
      } else {
        break;
      }
    }
  }

  void end_of_line() {
    skip_spaces();
    skip_comment();
    if (peek() == '\r') ++pos_;
    if (at_end()) return;
    if (peek() != '\n') fail(std::string("unexpected '") + peek() + "' after value");
    take();
  }

  std::string bare_or_quoted_key() {
    skip_spaces();
    if (peek() == '"') return basic_string();
    if (peek() == '\'') return literal_string();
    const std::size_t begin = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
                         peek() == '-')) {
      ++pos_;
    }
    if (pos_ == begin) fail("expected a key");
    return std::string(s_.substr(begin, pos_ - begin));
  }

  std::vector<std::string> dotted_key() {
    std::vector<std::string> parts{bare_or_quoted_key()};
    skip_spaces();
    while (peek() == '.') {
      ++pos_;
      parts.push_back(bare_or_quoted_key());
      skip_spaces();
    }
    return parts;
  }

  json* descend(json& root, const std::vector<std::string>& path, std::size_t count) {
    json* t = &root;
    for (std::size_t i = 0; i < count; ++i) {
      json& next = (*t)[path[i]];
      if (next.is_null()) next = json::object();
      if (next.is_array() && !next.empty() && next.back().is_object()) {
        t = &next.back();
      } else if (next.is_object()) {
        t = &next;
      } else {
        fail("key '" + path[i] + "' is not a table");
      }
    }
    return t;
  }

  json* header(json& root) {
    ++pos_;
    const bool array = peek() == '[';
    if (array) ++pos_;
    auto path = dotted_key();
    if (take() != ']' || (array && take() != ']')) fail("malformed table header");
    json* parent = descend(root, path, path.size() - 1);
    json& slot = (*parent)[path.back()];
    std::string name;
    for (const auto& p : path) name += (name.empty() ? "" : ".") + p;
    if (array) {
      if (slot.is_null()) slot = json::array();
      if (!slot.is_array()) fail("'" + name + "' is not an array of tables");
      slot.push_back(json::object());
      return &slot.back();
    }
    if (!defined_.insert(name).second) fail("table [" + name + "] defined twice");
    if (slot.is_null()) slot = json::object();
    if (!slot.is_object()) fail("'" + name + "' is not a table");
    return &slot;
  }

  void key_value(json& table) {
    auto path = dotted_key();
    skip_spaces();
    if (take() != '=') fail("expected '=' after key");
    skip_spaces();
    json v = value();
    json* t = descend(table, path, path.size() - 1);
    if (t->contains(path.back())) fail("duplicate key '" + path.back() + "'");
    (*t)[path.back()] = std::move(v);
  }

  json value() {
    const char c = peek();
    if (c == '"') return basic_string();
    if (c == '\'') return literal_string();
    if (c == '[') return array();
    if (c == '{') return inline_table();
    if (s_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return true;
    }
    if (s_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return false;
    }
    return number();
  }

  std::string basic_string() {
    ++pos_;
    std::string out;
    while (true) {
      if (at_end() || peek() == '\n') fail("unterminated string");
      char c = take();
      if (c == '"') return out;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (at_end()) fail("unterminated escape");
      c = take();
      switch (c) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case 'b': out += '\b'; break;
        case 'f': out += '\f'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'u':
        case 'U': {
          const std::size_t n = c == 'u' ? 4 : 8;
          if (pos_ + n > s_.size()) fail("short unicode escape");
          std::uint32_t cp = 0;
          auto [p, ec] = std::from_chars(s_.data() + pos_, s_.data() + pos_ + n, cp, 16);
          if (ec != std::errc() || p != s_.data() + pos_ + n) fail("bad unicode escape");
          pos_ += n;
          append_utf8(out, cp);
          break;
        }
        default:
          fail(std::string("unknown escape \\") + c);
      }
    }
  }

  static void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
      out += static_cast<char>(cp);
    } else if (cp < 0x800) {
      out += static_cast<char>(0xC0 | (cp >> 6));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
      out += static_cast<char>(0xE0 | (cp >> 12));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
      out += static_cast<char>(0xF0 | (cp >> 18));
      out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    }
  }

  std::string literal_string() {
    ++pos_;
    const std::size_t begin = pos_;
    while (!at_end() && peek() != '\'' && peek() != '\n') ++pos_;
    if (peek() != '\'') fail("unterminated literal string");
    std::string out(s_.substr(begin, pos_ - begin));
    ++pos_;
    return out;
  }

  json array() {
    ++pos_;
    json out = json::array();
    while (true) {
      skip_blank_lines();
      if (at_end()) fail("unterminated array");
      if (peek() == ']') {
        ++pos_;
        return out;
      }
      out.push_back(value());
      skip_blank_lines();
      if (peek() == ',') {
        ++pos_;
      } else if (peek() != ']') {
        fail("expected ',' or ']' in array");
      }
    }
  }

  json inline_table() {
    ++pos_;
    json out = json::object();
    skip_spaces();
    if (peek() == '}') {
      ++pos_;
      return out;
    }
    while (true) {
      key_value(out);
      skip_spaces();
      const char c = at_end() ? '\0' : take();
      if (c == '}') return out;
      if (c != ',') fail("expected ',' or '}' in inline table");
    }
  }

  json number() {
    const std::size_t begin = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '+' ||
                         peek() == '-' || peek() == '.' || peek() == '_')) {
      ++pos_;
    }
    std::string tok;
    for (char c : s_.substr(begin, pos_ - begin)) {
      if (c != '_') tok += c;
    }
    if (tok.empty()) fail("expected a value");
    if (tok == "inf" || tok == "+inf" || tok == "-inf" || tok == "nan") {
      fail("non-finite numbers are not accepted");
    }
    const bool is_float = tok.find_first_of(".eE") != std::string::npos;
    const char* first = tok.data() + (tok[0] == '+' ? 1 : 0);
    const char* last = tok.data() + tok.size();
    if (is_float) {
      double d = 0.0;
      auto [p, ec] = std::from_chars(first, last, d);
      if (ec != std::errc() || p != last) fail("bad number '" + tok + "'");
      return d;
    }
    std::int64_t i = 0;
    auto [p, ec] = std::from_chars(first, last, i);
    if (ec != std::errc() || p != last) fail("bad value '" + tok + "'");
    return i;
  }

  std::string_view s_;
  std::string_view source_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::set<std::string> defined_;
};

}  // namespace

nlohmann::json parse_toml(std::string_view text, std::string_view source_name) {
  return Parser(text, source_name).run();
}

nlohmann::json parse_toml(std::istream& in, std::string_view source_name) {
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  return parse_toml(std::string_view(text), source_name);
}

nlohmann::json load_toml(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open config " + path.string());
  return parse_toml(in, path.string());
}

}  // namespace revlab
