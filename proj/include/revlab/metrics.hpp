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

#ifndef REVLAB_METRICS_HPP_
#define REVLAB_METRICS_HPP_

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "revlab/corpus.hpp"

namespace revlab {

struct RatingEval {
  std::vector<double> squared_errors;
  std::vector<double> absolute_errors;
  double rmse = 0.0;
  double mae = 0.0;
};

RatingEval rating_metrics(std::span<const double> predictions, std::span<const double> targets);

struct RankedList {
  std::string user_id;
  std::vector<std::string> candidates;  // best first
  std::size_t positive_rank = 0;        // 1-based
};

// Orders candidates by descending score, ties by item id ascending.
RankedList rank_candidates(std::string user_id, std::span<const std::string> items,
                           std::span<const double> scores, const std::string& positive);

double reciprocal_rank_at(std::size_t rank, std::size_t k);
double ndcg_at(std::size_t rank, std::size_t k);

struct RankingEval {
  std::size_t k = 0;
  double mrr = 0.0;
  double ndcg = 0.0;
  std::vector<double> per_list_rr;
  std::vector<double> per_list_ndcg;
};

RankingEval ranking_metrics(std::span<const RankedList> lists, std::size_t k);

// Per-item metadata and training-period aggregates.
struct ItemStats {
  double hotel_class = 0.0;
  std::string region;
  std::size_t review_count = 0;  // training-period reviews
  double mean_helpful_votes = 0.0;
  std::size_t popularity_rank = 0;  // 1 = most reviewed
};

class ItemCatalog {
 public:
  // Metadata comes from any review of the item; counts and helpfulness only
  // from reviews accepted by `in_training_period`.
  static ItemCatalog build(const Corpus& c,
                           const std::function<bool(const ReviewRecord&)>& in_training_period);

  const ItemStats& at(const std::string& item) const;
  std::size_t size() const { return items_.size(); }

 private:
  std::map<std::string, ItemStats> items_;
};

struct BusinessEval {
  std::size_t k = 0;
  double avg_stars = 0.0;
  double avg_popularity = 0.0;
  double avg_helpfulness = 0.0;
  double avg_regional_spread = 0.0;
  std::optional<double> avg_popularity_rank;
  std::vector<double> per_user_stars;
  std::vector<double> per_user_popularity;
  std::vector<double> per_user_helpfulness;
  std::vector<double> per_user_regional_spread;
  std::vector<double> per_user_popularity_rank;  // only with the rank variant
};

// Per user over the first k items of each list, then averaged over users.
BusinessEval business_metrics(std::span<const std::vector<std::string>> top_lists,
                              const ItemCatalog& catalog, std::size_t k = 10,
                              bool include_popularity_rank = false);

struct SignificanceResult {
  double t_statistic = 0.0;
  double degrees_of_freedom = 0.0;
  double p_value = 1.0;
  std::string stars;
  bool no_difference = false;  // zero-variance, zero-mean differences
  double mean_difference = 0.0;
};

// "***" p <= 0.001, "**" p <= 0.05, "*" p <= 0.1.
std::string significance_stars(double p);

// Two-sided p-value of Student's t with df degrees of freedom.
double student_t_two_sided_p(double t, double df);

// Two-sided paired t-test on a - b.
SignificanceResult paired_t_test(std::span<const double> a, std::span<const double> b);

// Welch's unequal-variance two-sample t-test on mean(a) - mean(b).
SignificanceResult welch_t_test(std::span<const double> a, std::span<const double> b);

nlohmann::json to_json(const SignificanceResult& s);

enum class MetricDirection { kLowerIsBetter, kHigherIsBetter };

// Relative change in percent, signed so that positive means "better".
double percent_change(double baseline, double treatment, MetricDirection direction);

// "12.1% reduction" / "27.9% improvement" (one decimal).
std::string render_percent_change(double baseline, double treatment, MetricDirection direction);

}  // namespace revlab

#endif  // REVLAB_METRICS_HPP_
