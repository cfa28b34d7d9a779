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

#include "revlab/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "revlab/digest.hpp"
#include "revlab/error.hpp"
#include "revlab/rng.hpp"

namespace revlab {

const UserSplit* SplitPlan::find(const std::string& user_id) const {
  auto it = std::lower_bound(users.begin(), users.end(), user_id,
                             [](const UserSplit& u, const std::string& id) { return u.user_id < id; });
  return (it != users.end() && it->user_id == user_id) ? &*it : nullptr;
}

SplitPlan leave_one_out_split(const Corpus& c, std::uint64_t master_seed) {
  std::map<std::string, std::vector<EventKey>> by_user;
  for (const auto& r : c.records()) by_user[r.user_id].push_back(event_key(r));
  SplitPlan plan;
  plan.master_seed = master_seed;
  for (auto& [user, events] : by_user) {
    if (events.size() < 2) {
      plan.excluded_users.push_back(user);
      continue;
    }
    std::sort(events.begin(), events.end());
    UserSplit u;
    u.user_id = user;
    u.test = events.back().review_id;
    for (std::size_t i = 0; i + 1 < events.size(); ++i) u.train.push_back(events[i].review_id);
    plan.users.push_back(std::move(u));
  }
  return plan;
}

SplitPlan carve_validation(SplitPlan plan, double fraction) {
  if (!(fraction >= 0.0 && fraction < 1.0)) {
    throw ValidationError("validation fraction must lie in [0, 1)");
  }
  for (auto& u : plan.users) {
    u.train.insert(u.train.end(), u.validation.begin(), u.validation.end());
    u.validation.clear();
    const std::size_t n = u.train.size();
    if (n < 2) continue;
    // The epsilon keeps exact products such as 0.1 * 30 from rounding up.
    auto count = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
    count = std::clamp<std::size_t>(count, 1, n - 1);
    u.validation.assign(u.train.end() - static_cast<std::ptrdiff_t>(count), u.train.end());
    u.train.resize(n - count);
  }
  return plan;
}

SplitPlan sample_negatives(SplitPlan plan, const Corpus& c, std::size_t n) {
  std::set<std::string> catalog;
  std::unordered_map<std::string, std::unordered_set<std::string>> touched;
  for (const auto& r : c.records()) {
    catalog.insert(r.item_id);
    touched[r.user_id].insert(r.item_id);
  }
  for (auto& u : plan.users) {
    const auto& seen = touched[u.user_id];
    std::vector<std::string> eligible;
    eligible.reserve(catalog.size());
    for (const auto& item : catalog) {
      if (!seen.contains(item)) eligible.push_back(item);
    }
    if (eligible.size() < n) {
      throw ValidationError("user " + u.user_id + " has only " + std::to_string(eligible.size()) +
                            " never-reviewed items; cannot draw " + std::to_string(n) +
                            " negatives");
    }
    Rng rng(derive_seed(plan.master_seed, u.user_id));
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t pick = j + rng.uniform_below(eligible.size() - j);
      std::swap(eligible[j], eligible[pick]);
    }
    eligible.resize(n);
    u.negatives = std::move(eligible);
  }
  return plan;
}

std::vector<RankingCase> build_ranking_testset(const SplitPlan& plan, const Corpus& c) {
  std::vector<RankingCase> out;
  for (const auto& u : plan.users) {
    const ReviewRecord* test = c.find(u.test);
    if (test == nullptr) {
      throw ValidationError("test review " + std::to_string(u.test) + " not in corpus '" +
                            c.label() + "'");
    }
    if (test->overall_rating != 5) continue;
    out.push_back({u.user_id, u.test, test->item_id, u.negatives});
  }
  return out;
}

nlohmann::json to_json(const SplitPlan& plan) {
  nlohmann::json users = nlohmann::json::array();
  for (const auto& u : plan.users) {
    users.push_back({{"user_id", u.user_id},
                     {"test", u.test},
                     {"validation", u.validation},
                     {"train", u.train},
                     {"negatives", u.negatives}});
  }
  return {{"master_seed", plan.master_seed},
          {"users", std::move(users)},
          {"excluded_users", plan.excluded_users}};
}

SplitPlan split_plan_from_json(const nlohmann::json& j) {
  SplitPlan plan;
  try {
    plan.master_seed = j.at("master_seed").get<std::uint64_t>();
    for (const auto& ju : j.at("users")) {
      UserSplit u;
      u.user_id = ju.at("user_id").get<std::string>();
      u.test = ju.at("test").get<ReviewId>();
      u.validation = ju.at("validation").get<std::vector<ReviewId>>();
      u.train = ju.at("train").get<std::vector<ReviewId>>();
      u.negatives = ju.at("negatives").get<std::vector<std::string>>();
      plan.users.push_back(std::move(u));
    }
    plan.excluded_users = j.at("excluded_users").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("split plan JSON: ") + e.what());
  }
  if (!std::is_sorted(plan.users.begin(), plan.users.end(),
                      [](const UserSplit& a, const UserSplit& b) { return a.user_id < b.user_id; })) {
    throw ValidationError("split plan users must be sorted by user_id");
  }
  return plan;
}

std::string plan_digest(const SplitPlan& plan) { return sha256_hex(to_json(plan).dump()); }

}  // namespace revlab
