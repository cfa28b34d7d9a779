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

#include "revlab/prompts.hpp"

#include <array>

#include "revlab/error.hpp"

namespace revlab {
namespace {

struct ScenarioRow {
  PromptScenario scenario;
  const char* name;
  const char* system_asset;
  const char* user_asset;
};

constexpr std::array<ScenarioRow, 5> kRows{{
    {PromptScenario::kUserCentric, "user_centric", "user_centric.system.txt",
     "user_centric.user.txt"},
    {PromptScenario::kPlatformNeutral, "platform_neutral", "platform_neutral.system.txt",
     "platform.user.txt"},
    {PromptScenario::kPlatformEncouraging, "encouraging", "platform_encouraging.system.txt",
     "platform.user.txt"},
    {PromptScenario::kPlatformConstructive, "constructive", "platform_constructive.system.txt",
     "platform.user.txt"},
    {PromptScenario::kPlatformCritical, "critical", "platform_critical.system.txt",
     "platform.user.txt"},
}};

const ScenarioRow& row(PromptScenario s) {
  for (const auto& r : kRows) {
    if (r.scenario == s) return r;
  }
  throw ValidationError("unknown prompt scenario");
}

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos;
       pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

}  // namespace

std::string to_string(PromptScenario s) { return row(s).name; }

PromptScenario prompt_scenario_from_string(std::string_view s) {
  for (const auto& r : kRows) {
    if (s == r.name) return r.scenario;
  }
  throw ValidationError("unknown prompt scenario '" + std::string(s) + "'");
}

const std::vector<PromptScenario>& all_prompt_scenarios() {
  static const std::vector<PromptScenario> all = [] {
    std::vector<PromptScenario> v;
    for (const auto& r : kRows) v.push_back(r.scenario);
    return v;
  }();
  return all;
}

std::string_view prompt_asset(std::string_view name) {
  for (std::size_t i = 0; i < detail::kEmbeddedAssetCount; ++i) {
    const auto& a = detail::kEmbeddedAssets[i];
    if (name == a.name) return {reinterpret_cast<const char*>(a.data), a.size};
  }
  throw ValidationError("no embedded prompt asset '" + std::string(name) + "'");
}

std::vector<std::string> prompt_asset_names() {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < detail::kEmbeddedAssetCount; ++i) {
    names.emplace_back(detail::kEmbeddedAssets[i].name);
  }
  return names;
}

PromptBundle prompt_bundle(PromptScenario s) {
  const auto& r = row(s);
  return {s, r.system_asset, r.user_asset, prompt_asset(r.system_asset),
          prompt_asset(r.user_asset)};
}

std::string month_year(int year, int month) {
  static constexpr std::array<const char*, 12> kMonths{
      "January", "February", "March",     "April",   "May",      "June",
      "July",    "August",   "September", "October", "November", "December"};
  if (month < 1 || month > 12) throw ValidationError("month out of range");
  return std::string(kMonths[static_cast<std::size_t>(month - 1)]) + " " + std::to_string(year);
}

std::string fill_user_centric(const ReviewRecord& r) {
  if (!r.text || r.text->empty()) {
    throw ValidationError("review " + std::to_string(r.review_id) +
                          " has no draft text for the user-centric prompt");
  }
  std::string details;
  for (const auto& [aspect, value] : r.aspect_ratings) {
    if (!details.empty()) details += ", ";
    details += aspect + ": " + std::to_string(value);
  }
  if (details.empty()) details = "none";
  std::string out(prompt_bundle(PromptScenario::kUserCentric).user_template);
  replace_all(out, "[hotel-name]", r.hotel.name);
  replace_all(out, "[overall-ratings]", std::to_string(r.overall_rating));
  replace_all(out, "[details-ratings]", details);
  // Last, so placeholder-like text inside the draft is left alone.
  replace_all(out, "[user-review-text]", *r.text);
  return out;
}

nlohmann::json platform_metadata(const ReviewRecord& r) {
  nlohmann::json score = nlohmann::json::object();
  for (const auto& [aspect, value] : r.aspect_ratings) score[aspect] = value;
  score["overall"] = r.overall_rating;
  nlohmann::json j = nlohmann::json::object();
  j["Score"] = std::move(score);
  j["Location"] = {{"region", r.hotel.region}, {"locality", r.hotel.locality}};
  j["Name"] = r.hotel.name;
  j["Link"] = r.hotel.link ? nlohmann::json(*r.hotel.link) : nlohmann::json(nullptr);
  j["Date_stayed_in_hotel"] = r.stay_date
                                  ? nlohmann::json(month_year(r.stay_date->year, r.stay_date->month))
                                  : nlohmann::json(nullptr);
  j["Date_review"] = month_year(r.review_date.year, r.review_date.month);
  j["Class"] = r.hotel.hotel_class;
  return j;
}

std::string fill_platform(const ReviewRecord& r) {
  std::string out(prompt_asset("platform.user.txt"));
  replace_all(out, "[metadata-json]", platform_metadata(r).dump());
  return out;
}

}  // namespace revlab
