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

// Per-user leave-one-out splitting, temporal validation carve-out, negative
// sampling for ranking evaluation. Everything here reads review metadata only,
// so aligned corpora produce byte-identical plans.

#ifndef REVLAB_PROTOCOL_HPP_
#define REVLAB_PROTOCOL_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "revlab/corpus.hpp"

namespace revlab {

struct UserSplit {
  std::string user_id;
  ReviewId test = 0;
  std::vector<ReviewId> validation;  // oldest first
  std::vector<ReviewId> train;       // oldest first
  std::vector<std::string> negatives;
};

struct SplitPlan {
  std::uint64_t master_seed = 0;
  std::vector<UserSplit> users;  // ascending user_id
  std::vector<std::string> excluded_users;  // fewer than two reviews

  const UserSplit* find(const std::string& user_id) const;
};

SplitPlan leave_one_out_split(const Corpus& c, std::uint64_t master_seed = 0);

// Latest ceil(fraction * n) of each user's n non-test reviews become
// validation (at least one when n >= 2, never all of them).
SplitPlan carve_validation(SplitPlan plan, double fraction = 0.10);

// n distinct items per user, uniform without replacement among catalog items
// the user never reviewed. Stream keyed by (master_seed, user_id).
SplitPlan sample_negatives(SplitPlan plan, const Corpus& c, std::size_t n = 99);

struct RankingCase {
  std::string user_id;
  ReviewId test_review = 0;
  std::string positive_item;
  std::vector<std::string> negatives;

  std::size_t candidate_count() const { return 1 + negatives.size(); }
};

// Users whose test review is a 5-star rating.
std::vector<RankingCase> build_ranking_testset(const SplitPlan& plan, const Corpus& c);

nlohmann::json to_json(const SplitPlan& plan);
SplitPlan split_plan_from_json(const nlohmann::json& j);
// SHA-256 of the canonical JSON serialization.
std::string plan_digest(const SplitPlan& plan);

}  // namespace revlab

#endif  // REVLAB_PROTOCOL_HPP_
