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

// Small builders shared by the unit and acceptance tests.

#ifndef REVLAB_TESTS_FIXTURES_HPP_
#define REVLAB_TESTS_FIXTURES_HPP_

#include <unistd.h>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "revlab/corpus.hpp"

namespace revlab::testing {

struct ReviewSpec {
  ReviewId id = 0;
  std::string user;
  std::string item;
  int rating = 3;
  std::string date = "2020-01-01";
  std::string text = "nice stay";
  double hotel_class = 3.0;
  std::string region = "Region 1";
  std::int64_t helpful = 0;
};

inline ReviewRecord make_review(const ReviewSpec& s) {
  ReviewRecord r;
  r.review_id = s.id;
  r.user_id = s.user;
  r.item_id = s.item;
  r.overall_rating = s.rating;
  r.review_date = *Date::parse(s.date);
  r.helpful_votes = s.helpful;
  r.text = s.text;
  r.hotel.name = "Hotel " + s.item;
  r.hotel.region = s.region;
  r.hotel.locality = s.region + " town";
  r.hotel.hotel_class = s.hotel_class;
  return r;
}

inline Corpus make_corpus(const std::vector<ReviewSpec>& specs, std::string label = "t") {
  std::vector<ReviewRecord> records;
  for (const auto& s : specs) records.push_back(make_review(s));
  return Corpus(std::move(label), std::move(records));
}

// Dense grid: users u0..u{nu-1}, each reviewing `per_user` distinct items out
// of `items`, one review per day per user; rating pattern is deterministic.
inline Corpus grid_corpus(int nu, int items, int per_user, std::string label = "grid") {
  std::vector<ReviewSpec> specs;
  ReviewId id = 1;
  for (int u = 0; u < nu; ++u) {
    for (int j = 0; j < per_user; ++j) {
      const int i = (u * 7 + j * 3) % items;
      char date[16];
      std::snprintf(date, sizeof(date), "2020-%02d-%02d", 1 + j / 28, 1 + j % 28);
      specs.push_back({id++, "u" + std::to_string(100 + u), "h" + std::to_string(100 + i),
                       1 + (u + i) % 5, date, "review " + std::to_string(u) + " " + std::to_string(i),
                       1.0 + (i % 5), "Region " + std::to_string(i % 4), (u + i) % 3});
    }
  }
  return make_corpus(specs, std::move(label));
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  static std::atomic<int> counter{0};
  auto dir = std::filesystem::temp_directory_path() /
             ("revlab-test-" + std::to_string(::getpid()) + "-" + name + "-" +
              std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace revlab::testing

#endif  // REVLAB_TESTS_FIXTURES_HPP_
