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

#include "revlab/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "revlab/error.hpp"
#include "revlab/text.hpp"

namespace revlab {
namespace {

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  int v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  out = v;
  return true;
}

int days_in_month(int year, int month) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month == 2) {
    const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    return leap ? 29 : 28;
  }
  return kDays[month - 1];
}

const nlohmann::json& require(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    throw ValidationError(std::string("missing required field '") + key + "'");
  }
  return *it;
}

std::string require_string(const nlohmann::json& j, const char* key) {
  const auto& v = require(j, key);
  if (!v.is_string()) throw ValidationError(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::int64_t require_int(const nlohmann::json& j, const char* key) {
  const auto& v = require(j, key);
  if (!v.is_number_integer()) {
    throw ValidationError(std::string("field '") + key + "' must be an integer");
  }
  return v.get<std::int64_t>();
}

int require_rating(const nlohmann::json& v, const std::string& what) {
  if (!v.is_number_integer()) throw ValidationError(what + " must be an integer");
  const auto r = v.get<std::int64_t>();
  if (r < 1 || r > 5) {
    throw ValidationError(what + " out of range 1-5: " + std::to_string(r));
  }
  return static_cast<int>(r);
}

}  // namespace

std::optional<Date> Date::parse(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  Date d;
  if (!parse_int(s.substr(0, 4), d.year) || !parse_int(s.substr(5, 2), d.month) ||
      !parse_int(s.substr(8, 2), d.day)) {
    return std::nullopt;
  }
  if (d.month < 1 || d.month > 12) return std::nullopt;
  if (d.day < 1 || d.day > days_in_month(d.year, d.month)) return std::nullopt;
  return d;
}

std::string Date::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
  return buf;
}

std::optional<YearMonth> YearMonth::parse(std::string_view s) {
  if (s.size() != 7 || s[4] != '-') return std::nullopt;
  YearMonth ym;
  if (!parse_int(s.substr(0, 4), ym.year) || !parse_int(s.substr(5, 2), ym.month)) {
    return std::nullopt;
  }
  if (ym.month < 1 || ym.month > 12) return std::nullopt;
  return ym;
}

std::string YearMonth::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d", year, month);
  return buf;
}

nlohmann::json to_json(const ReviewRecord& r) {
  nlohmann::json j;
  j["review_id"] = r.review_id;
  j["user_id"] = r.user_id;
  j["item_id"] = r.item_id;
  j["overall_rating"] = r.overall_rating;
  if (!r.aspect_ratings.empty()) {
    nlohmann::json aspects = nlohmann::json::object();
    for (const auto& [name, v] : r.aspect_ratings) aspects[name] = v;
    j["aspect_ratings"] = std::move(aspects);
  }
  j["review_date"] = r.review_date.to_string();
  if (r.stay_date) j["stay_date"] = r.stay_date->to_string();
  j["helpful_votes"] = r.helpful_votes;
  if (r.text) j["text"] = *r.text;
  nlohmann::json hotel;
  hotel["name"] = r.hotel.name;
  hotel["region"] = r.hotel.region;
  hotel["locality"] = r.hotel.locality;
  hotel["class"] = r.hotel.hotel_class;
  if (r.hotel.link) hotel["link"] = *r.hotel.link;
  j["hotel"] = std::move(hotel);
  return j;
}

ReviewRecord record_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("line is not a JSON object");
  ReviewRecord r;
  r.review_id = require_int(j, "review_id");
  r.user_id = require_string(j, "user_id");
  r.item_id = require_string(j, "item_id");
  r.overall_rating = require_rating(require(j, "overall_rating"), "overall_rating");

  if (auto it = j.find("aspect_ratings"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) throw ValidationError("aspect_ratings must be an object");
    for (const auto& [name, v] : it->items()) {
      r.aspect_ratings[name] = require_rating(v, "aspect rating '" + name + "'");
    }
  }

  const std::string date = require_string(j, "review_date");
  auto parsed = Date::parse(date);
  if (!parsed) throw ValidationError("review_date does not parse: '" + date + "'");
  r.review_date = *parsed;

  if (auto it = j.find("stay_date"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw ValidationError("stay_date must be a string");
    auto ym = YearMonth::parse(it->get<std::string>());
    if (!ym) throw ValidationError("stay_date does not parse: '" + it->get<std::string>() + "'");
    if (*ym > YearMonth{r.review_date.year, r.review_date.month}) {
      throw ValidationError("stay_date " + ym->to_string() + " is after review_date " +
                            r.review_date.to_string());
    }
    r.stay_date = ym;
  }

  if (auto it = j.find("helpful_votes"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer()) throw ValidationError("helpful_votes must be an integer");
    r.helpful_votes = it->get<std::int64_t>();
    if (r.helpful_votes < 0) throw ValidationError("helpful_votes must be non-negative");
  }

  if (auto it = j.find("text"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw ValidationError("text must be a string");
    r.text = it->get<std::string>();
  }

  const auto& hotel = require(j, "hotel");
  if (!hotel.is_object()) throw ValidationError("hotel must be an object");
  r.hotel.name = require_string(hotel, "name");
  r.hotel.region = require_string(hotel, "region");
  r.hotel.locality = require_string(hotel, "locality");
  const auto& cls = require(hotel, "class");
  if (!cls.is_number()) throw ValidationError("hotel.class must be a number");
  r.hotel.hotel_class = cls.get<double>();
  if (!(r.hotel.hotel_class >= 1.0 && r.hotel.hotel_class <= 5.0)) {
    throw ValidationError("hotel.class out of range [1,5]");
  }
  if (auto it = hotel.find("link"); it != hotel.end() && !it->is_null()) {
    if (!it->is_string()) throw ValidationError("hotel.link must be a string");
    r.hotel.link = it->get<std::string>();
  }
  return r;
}

Corpus::Corpus(std::string label, std::vector<ReviewRecord> records)
    : label_(std::move(label)), records_(std::move(records)) {
  if (label_.empty()) throw ValidationError("corpus label must be nonempty");
  index_.reserve(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    auto [it, inserted] = index_.emplace(records_[i].review_id, i);
    if (!inserted) {
      throw ValidationError("duplicate review_id " + std::to_string(records_[i].review_id));
    }
  }
}

const ReviewRecord* Corpus::find(ReviewId id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &records_[it->second];
}

Corpus Corpus::with_records(std::vector<ReviewRecord> records) const {
  return Corpus(label_, std::move(records));
}

Corpus parse_corpus(std::istream& in, std::string label, std::string_view source_name) {
  std::vector<ReviewRecord> records;
  std::unordered_map<ReviewId, std::size_t> first_line;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = std::string(source_name) + ":" + std::to_string(line_no) + ": ";
    ReviewRecord r;
    try {
      r = record_from_json(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(where + "malformed JSON: " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(where + e.what());
    }
    auto [it, inserted] = first_line.emplace(r.review_id, line_no);
    if (!inserted) {
      throw ValidationError(where + "duplicate review_id " + std::to_string(r.review_id) +
                            " (first seen on line " + std::to_string(it->second) + ")");
    }
    records.push_back(std::move(r));
  }
  return Corpus(std::move(label), std::move(records));
}

Corpus load_corpus(const std::filesystem::path& path, std::string label) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open corpus file " + path.string());
  return parse_corpus(in, std::move(label), path.string());
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& r : corpus.records()) out << to_json(r).dump() << '\n';
}

void write_corpus(const std::filesystem::path& path, const Corpus& corpus) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  write_corpus(out, corpus);
}

Corpus filter_min_interactions(const Corpus& c, int min_count, FilterMode mode) {
  if (min_count < 1) throw ValidationError("min_count must be >= 1");
  std::vector<ReviewRecord> current = c.records();
  while (true) {
    std::unordered_map<std::string, int> users;
    std::unordered_map<std::string, int> items;
    for (const auto& r : current) {
      ++users[r.user_id];
      ++items[r.item_id];
    }
    std::vector<ReviewRecord> kept;
    kept.reserve(current.size());
    for (auto& r : current) {
      if (users[r.user_id] >= min_count && items[r.item_id] >= min_count) {
        kept.push_back(std::move(r));
      }
    }
    const bool changed = kept.size() != current.size();
    current = std::move(kept);
    if (!changed || mode == FilterMode::kSinglePass) break;
  }
  return c.with_records(std::move(current));
}

AlignedCorpora align_corpora(const Corpus& a, const Corpus& b) {
  std::set<ReviewId> only_a;
  std::set<ReviewId> only_b;
  for (const auto& r : a.records()) {
    if (b.find(r.review_id) == nullptr) only_a.insert(r.review_id);
  }
  for (const auto& r : b.records()) {
    if (a.find(r.review_id) == nullptr) only_b.insert(r.review_id);
  }
  if (!only_a.empty() || !only_b.empty()) {
    std::ostringstream msg;
    msg << "corpora '" << a.label() << "' and '" << b.label()
        << "' are not aligned; review_ids present on one side only: {";
    bool first = true;
    for (const auto* ids : {&only_a, &only_b}) {
      for (ReviewId id : *ids) {
        msg << (first ? "" : ", ") << id;
        first = false;
      }
    }
    msg << "}";
    throw ValidationError(msg.str());
  }
  for (const auto& ra : a.records()) {
    const ReviewRecord& rb = *b.find(ra.review_id);
    const char* field = nullptr;
    if (ra.user_id != rb.user_id) field = "user_id";
    else if (ra.item_id != rb.item_id) field = "item_id";
    else if (ra.overall_rating != rb.overall_rating) field = "overall_rating";
    else if (ra.aspect_ratings != rb.aspect_ratings) field = "aspect_ratings";
    else if (ra.review_date != rb.review_date) field = "review_date";
    else if (ra.stay_date != rb.stay_date) field = "stay_date";
    else if (ra.helpful_votes != rb.helpful_votes) field = "helpful_votes";
    else if (!(ra.hotel == rb.hotel)) field = "hotel";
    if (field != nullptr) {
      throw ValidationError("metadata mismatch at review_id " + std::to_string(ra.review_id) +
                            ": field " + field + " differs between '" + a.label() +
                            "' and '" + b.label() + "'");
    }
  }
  return {&a, &b};
}

StatsSummary corpus_stats(const Corpus& c) {
  StatsSummary s;
  s.records = c.size();
  if (c.empty()) return s;
  std::unordered_set<std::string> vocab;
  double words = 0.0;
  double chars = 0.0;
  for (const auto& r : c.records()) {
    if (!r.text) {
      throw ValidationError("review_id " + std::to_string(r.review_id) + " has no text");
    }
    words += static_cast<double>(text::split_whitespace(*r.text).size());
    chars += static_cast<double>(text::utf8_length(*r.text));
    for (auto& tok : text::normalized_tokens(*r.text)) vocab.insert(std::move(tok));
  }
  s.avg_word_count = words / static_cast<double>(c.size());
  s.avg_char_count = chars / static_cast<double>(c.size());
  s.vocabulary_size = vocab.size();
  return s;
}

}  // namespace revlab
