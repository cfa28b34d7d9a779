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

// Review data model and corpus-level operations: JSONL loading with
// validation, the minimum-interaction filter, alignment of paired
// human/generated corpora and simple text statistics.

#ifndef REVLAB_CORPUS_HPP_
#define REVLAB_CORPUS_HPP_

#include <compare>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace revlab {

using ReviewId = std::int64_t;

struct Date {
  int year = 0;
  int month = 0;
  int day = 0;

  // Strict "YYYY-MM-DD" with calendar validation; nullopt on failure.
  static std::optional<Date> parse(std::string_view s);
  std::string to_string() const;
  auto operator<=>(const Date&) const = default;
};

struct YearMonth {
  int year = 0;
  int month = 0;

  static std::optional<YearMonth> parse(std::string_view s);  // "YYYY-MM"
  std::string to_string() const;
  auto operator<=>(const YearMonth&) const = default;
};

struct HotelInfo {
  std::string name;
  std::string region;
  std::string locality;
  double hotel_class = 0.0;
  std::optional<std::string> link;

  bool operator==(const HotelInfo&) const = default;
};

struct ReviewRecord {
  ReviewId review_id = 0;
  std::string user_id;
  std::string item_id;
  int overall_rating = 0;
  std::map<std::string, int> aspect_ratings;
  Date review_date;
  std::optional<YearMonth> stay_date;
  std::int64_t helpful_votes = 0;
  std::optional<std::string> text;
  HotelInfo hotel;
};

// Position of a review on the shared timeline: day granularity, same-day ties
// ordered by review_id ascending.
struct EventKey {
  Date date;
  ReviewId review_id = 0;

  auto operator<=>(const EventKey&) const = default;
};

inline EventKey event_key(const ReviewRecord& r) {
  return {r.review_date, r.review_id};
}

nlohmann::json to_json(const ReviewRecord& r);

// Parses and validates one corpus line. Throws ValidationError with a message
// naming the offending field; the caller prefixes the line number.
ReviewRecord record_from_json(const nlohmann::json& j);

class Corpus {
 public:
  Corpus() = default;
  // Validates label and review_id uniqueness.
  Corpus(std::string label, std::vector<ReviewRecord> records);

  const std::string& label() const { return label_; }
  const std::vector<ReviewRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  const ReviewRecord* find(ReviewId id) const;

  // Same label, different records; used by the filter.
  Corpus with_records(std::vector<ReviewRecord> records) const;

 private:
  std::string label_;
  std::vector<ReviewRecord> records_;
  std::unordered_map<ReviewId, std::size_t> index_;
};

Corpus load_corpus(const std::filesystem::path& path, std::string label);
Corpus parse_corpus(std::istream& in, std::string label,
                    std::string_view source_name = "<stream>");
void write_corpus(const std::filesystem::path& path, const Corpus& corpus);
void write_corpus(std::ostream& out, const Corpus& corpus);

enum class FilterMode { kFixpoint, kSinglePass };

// Drops users and items with fewer than min_count reviews. kFixpoint repeats
// until every survivor meets the threshold; kSinglePass counts once on the
// input and removes both sides in one sweep.
Corpus filter_min_interactions(const Corpus& c, int min_count = 5,
                               FilterMode mode = FilterMode::kFixpoint);

// Non-owning view over two corpora that share ids and metadata.
struct AlignedCorpora {
  const Corpus* base = nullptr;
  const Corpus* counterpart = nullptr;
};

AlignedCorpora align_corpora(const Corpus& a, const Corpus& b);

struct StatsSummary {
  std::size_t records = 0;
  double avg_word_count = 0.0;
  double avg_char_count = 0.0;
  std::size_t vocabulary_size = 0;
};

StatsSummary corpus_stats(const Corpus& c);

}  // namespace revlab

#endif  // REVLAB_CORPUS_HPP_
