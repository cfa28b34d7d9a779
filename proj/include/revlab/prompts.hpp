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

// Prompt templates for the review generation scenarios. The template text is
// compiled in from assets/prompts so the generation client and the golden
// hash checks read the same bytes.

#ifndef REVLAB_PROMPTS_HPP_
#define REVLAB_PROMPTS_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "revlab/corpus.hpp"

namespace revlab {

namespace detail {
struct EmbeddedAsset {
  const char* name;
  const unsigned char* data;
  std::size_t size;
};
extern const EmbeddedAsset kEmbeddedAssets[];
extern const std::size_t kEmbeddedAssetCount;
}  // namespace detail

enum class PromptScenario {
  kUserCentric,
  kPlatformNeutral,
  kPlatformEncouraging,
  kPlatformConstructive,
  kPlatformCritical,
};

// "user_centric", "platform_neutral", "encouraging", "constructive", "critical".
std::string to_string(PromptScenario s);
PromptScenario prompt_scenario_from_string(std::string_view s);
const std::vector<PromptScenario>& all_prompt_scenarios();

struct PromptBundle {
  PromptScenario scenario;
  std::string system_asset;  // asset file names
  std::string user_asset;
  std::string_view system_message;
  std::string_view user_template;
};

PromptBundle prompt_bundle(PromptScenario s);

// Raw bytes of one embedded asset; throws ValidationError for unknown names.
std::string_view prompt_asset(std::string_view name);
std::vector<std::string> prompt_asset_names();

// "[hotel-name]" style placeholders replaced from the record. Throws
// ValidationError when the record has no draft text.
std::string fill_user_centric(const ReviewRecord& r);

// The seven-key metadata object sent as the platform-centric user message.
nlohmann::json platform_metadata(const ReviewRecord& r);
std::string fill_platform(const ReviewRecord& r);

// "June 2012".
std::string month_year(int year, int month);

}  // namespace revlab

#endif  // REVLAB_PROMPTS_HPP_
