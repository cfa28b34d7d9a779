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

#include <gtest/gtest.h>

#include <map>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "revlab/error.hpp"

namespace revlab {
namespace {

using testing::make_corpus;
using testing::make_review;

std::string line(ReviewId id, const std::string& user = "u1", int rating = 5) {
  auto r = make_review({id, user, "h1", rating});
  return to_json(r).dump();
}

TEST(LoadCorpus, EmptyInputGivesEmptyCorpus) {
  std::istringstream in("");
  EXPECT_TRUE(parse_corpus(in, "x").empty());
}

TEST(LoadCorpus, SingleRecordRoundTrips) {
  std::istringstream in(line(1) + "\n");
  const Corpus c = parse_corpus(in, "x");
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c.records()[0].overall_rating, 5);
  EXPECT_EQ(c.label(), "x");
}

TEST(LoadCorpus, DuplicateIdNamesTheId) {
  std::string text;
  for (int i = 1; i <= 9; ++i) {
    ReviewId id = (i == 3 || i == 9) ? 7 : 100 + i;
    text += line(id) + "\n";
  }
  std::istringstream in(text);
  try {
    parse_corpus(in, "x", "dup.jsonl");
    FAIL() << "expected rejection";
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("review_id 7"), std::string::npos) << msg;
    EXPECT_NE(msg.find(":9"), std::string::npos) << msg;
  }
}

TEST(LoadCorpus, RejectsOutOfRangeRatingAndStayAfterReview) {
  {
    auto j = to_json(make_review({1, "u", "h", 5}));
    j["overall_rating"] = 6;
    std::istringstream in(j.dump());
    EXPECT_THROW(parse_corpus(in, "x"), ValidationError);
  }
  {
    auto j = to_json(make_review({1, "u", "h", 5, "2020-01-05"}));
    j["stay_date"] = "2020-02";
    std::istringstream in(j.dump());
    EXPECT_THROW(parse_corpus(in, "x"), ValidationError);
  }
  {
    std::istringstream in("{not json}\n");
    EXPECT_THROW(parse_corpus(in, "x"), ValidationError);
  }
}

TEST(LoadCorpus, BlankLinesAreSkipped) {
  std::istringstream in(line(1) + "\n\n" + line(2) + "\n");
  EXPECT_EQ(parse_corpus(in, "x").size(), 2u);
}

TEST(WriteCorpus, ParseWriteParseIsStable) {
  const Corpus c = testing::grid_corpus(4, 6, 3);
  std::ostringstream a;
  write_corpus(a, c);
  std::istringstream in(a.str());
  std::ostringstream b;
  write_corpus(b, parse_corpus(in, "grid"));
  EXPECT_EQ(a.str(), b.str());
}

// Repeats one counting sweep until nothing changes.
std::set<ReviewId> brute_force_fixpoint(const Corpus& c, int min_count) {
  std::set<ReviewId> alive;
  for (const auto& r : c.records()) alive.insert(r.review_id);
  while (true) {
    std::map<std::string, int> users, items;
    for (const auto& r : c.records()) {
      if (!alive.contains(r.review_id)) continue;
      ++users[r.user_id];
      ++items[r.item_id];
    }
    std::set<ReviewId> next;
    for (const auto& r : c.records()) {
      if (alive.contains(r.review_id) && users[r.user_id] >= min_count &&
          items[r.item_id] >= min_count) {
        next.insert(r.review_id);
      }
    }
    if (next == alive) return alive;
    alive = std::move(next);
  }
}

std::set<ReviewId> ids_of(const Corpus& c) {
  std::set<ReviewId> out;
  for (const auto& r : c.records()) out.insert(r.review_id);
  return out;
}

TEST(Filter, AlreadySatisfiedCorpusIsUnchanged) {
  const Corpus c = testing::grid_corpus(10, 10, 5);
  const Corpus f = filter_min_interactions(c, 5);
  EXPECT_EQ(ids_of(f), ids_of(c)) << "grid gives every item >= 5 reviews";
}

TEST(Filter, CascadeMatchesBruteForceFixpoint) {
  // Threshold 2. Item X has one review (by A), so it goes; A is left with one
  // review, so A goes; that takes item Y down to one review.
  const Corpus c = make_corpus({
      {1, "A", "X"}, {2, "A", "Y"},
      {3, "B", "Y"}, {4, "B", "Z"},
      {5, "C", "Z"}, {6, "C", "W"},
      {7, "D", "W"}, {8, "D", "Z"},
  });
  const Corpus fix = filter_min_interactions(c, 2, FilterMode::kFixpoint);
  EXPECT_EQ(ids_of(fix), brute_force_fixpoint(c, 2));
  EXPECT_EQ(ids_of(fix), (std::set<ReviewId>{5, 6, 7, 8}));
  const Corpus once = filter_min_interactions(c, 2, FilterMode::kSinglePass);
  EXPECT_EQ(ids_of(once), (std::set<ReviewId>{2, 3, 4, 5, 6, 7, 8}));
}

TEST(Filter, RandomCorporaMatchBruteForce) {
  for (int seed = 0; seed < 20; ++seed) {
    std::vector<testing::ReviewSpec> specs;
    std::uint64_t x = 1469598103934665603ULL + seed;
    ReviewId id = 1;
    for (int u = 0; u < 15; ++u) {
      for (int i = 0; i < 12; ++i) {
        x = x * 6364136223846793005ULL + 1442695040888963407ULL;
        if ((x >> 60) < 5) specs.push_back({id++, "u" + std::to_string(u), "h" + std::to_string(i)});
      }
    }
    const Corpus c = make_corpus(specs);
    EXPECT_EQ(ids_of(filter_min_interactions(c, 3)), brute_force_fixpoint(c, 3)) << seed;
  }
}

TEST(Align, CopyOfItselfAligns) {
  const Corpus a = testing::grid_corpus(3, 5, 2);
  const Corpus b = a.with_records(a.records());
  EXPECT_NO_THROW(align_corpora(a, b));
}

TEST(Align, MissingIdIsListed) {
  const Corpus a = make_corpus({{11, "u", "h"}, {12, "u", "h2"}, {13, "v", "h"}});
  const Corpus b = make_corpus({{11, "u", "h"}, {13, "v", "h"}});
  try {
    align_corpora(a, b);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("12"), std::string::npos) << e.what();
  }
}

TEST(Align, MetadataMismatchNamesIdAndField) {
  const Corpus a = make_corpus({{4, "u", "h", 5}, {5, "u", "h2", 3}});
  const Corpus b = make_corpus({{4, "u", "h", 2}, {5, "u", "h2", 3}});
  try {
    align_corpora(a, b);
    FAIL();
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("review_id 4"), std::string::npos) << msg;
    EXPECT_NE(msg.find("overall_rating"), std::string::npos) << msg;
  }
}

TEST(Align, TextMayDiffer) {
  const Corpus a = make_corpus({{1, "u", "h", 5, "2020-01-01", "human words"}});
  const Corpus b = make_corpus({{1, "u", "h", 5, "2020-01-01", "generated words"}});
  EXPECT_NO_THROW(align_corpora(a, b));
}

TEST(CorpusStats, HandCountedExamples) {
  const auto one = corpus_stats(make_corpus({{1, "u", "h", 5, "2020-01-01", "Great stay!"}}));
  EXPECT_DOUBLE_EQ(one.avg_word_count, 2.0);
  EXPECT_DOUBLE_EQ(one.avg_char_count, 11.0);
  EXPECT_EQ(one.vocabulary_size, 2u);
  const auto dup = corpus_stats(make_corpus(
      {{1, "u", "h", 5, "2020-01-01", "nice"}, {2, "v", "h", 5, "2020-01-01", "nice"}}));
  EXPECT_DOUBLE_EQ(dup.avg_word_count, 1.0);
  EXPECT_EQ(dup.vocabulary_size, 1u);
}

TEST(Dates, CalendarValidation) {
  EXPECT_TRUE(Date::parse("2024-02-29"));
  EXPECT_FALSE(Date::parse("2023-02-29"));
  EXPECT_FALSE(Date::parse("2023-13-01"));
  EXPECT_FALSE(Date::parse("2023-1-01"));
  EXPECT_TRUE(YearMonth::parse("2012-06"));
  EXPECT_FALSE(YearMonth::parse("2012-6"));
}

}  // namespace
}  // namespace revlab
