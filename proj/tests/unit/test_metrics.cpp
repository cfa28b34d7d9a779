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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fixtures.hpp"
#include "revlab/error.hpp"
#include "revlab/metrics.hpp"

namespace revlab {
namespace {

TEST(RatingMetrics, Examples) {
  const std::vector<double> pred = {3, 5}, target = {4, 3};
  const auto r = rating_metrics(pred, target);
  EXPECT_DOUBLE_EQ(r.rmse, std::sqrt(2.5));
  EXPECT_DOUBLE_EQ(r.mae, 1.5);
  EXPECT_EQ(r.squared_errors, (std::vector<double>{1, 4}));
  const auto perfect = rating_metrics(target, target);
  EXPECT_EQ(perfect.rmse, 0.0);
  EXPECT_EQ(perfect.mae, 0.0);
  EXPECT_THROW(rating_metrics({}, {}), ValidationError);
}

TEST(RankingMetrics, ClosedForms) {
  EXPECT_EQ(reciprocal_rank_at(1, 10), 1.0);
  EXPECT_EQ(ndcg_at(1, 10), 1.0);
  EXPECT_EQ(reciprocal_rank_at(4, 10), 0.25);
  EXPECT_NEAR(ndcg_at(4, 10), 0.43068, 5e-6);
  EXPECT_EQ(reciprocal_rank_at(15, 10), 0.0);
  EXPECT_EQ(ndcg_at(15, 10), 0.0);
  for (std::size_t r = 1; r < 30; ++r) {
    EXPECT_GE(reciprocal_rank_at(r, 10), reciprocal_rank_at(r + 1, 10));
    EXPECT_GE(ndcg_at(r, 10), ndcg_at(r + 1, 10));
  }
}

TEST(RankCandidates, TiesBreakByItemId) {
  const std::vector<std::string> items = {"c", "a", "b"};
  const std::vector<double> scores = {1.0, 1.0, 2.0};
  const auto list = rank_candidates("u", items, scores, "c");
  EXPECT_EQ(list.candidates, (std::vector<std::string>{"b", "a", "c"}));
  EXPECT_EQ(list.positive_rank, 3u);
}

// Brute force: count how many candidates beat the positive under the
// (score desc, id asc) order, independently of the library sort.
std::size_t brute_rank(const std::vector<std::string>& items, const std::vector<double>& scores,
                       std::size_t positive) {
  std::size_t better = 0;
  for (std::size_t j = 0; j < items.size(); ++j) {
    if (j == positive) continue;
    if (scores[j] > scores[positive] || (scores[j] == scores[positive] && items[j] < items[positive])) {
      ++better;
    }
  }
  return better + 1;
}

TEST(RankingMetrics, AllOrderingsMatchBruteForce) {
  std::vector<int> perm = {0, 1, 2, 3, 4};
  const std::vector<std::string> items = {"i0", "i1", "i2", "i3", "i4"};
  std::size_t count = 0;
  do {
    std::vector<double> scores(5);
    for (int j = 0; j < 5; ++j) scores[j] = perm[j];
    const auto list = rank_candidates("u", items, scores, "i0");
    const std::size_t expect = brute_rank(items, scores, 0);
    EXPECT_EQ(list.positive_rank, expect);
    for (std::size_t k : {3u, 5u}) {
      const auto eval = ranking_metrics(std::span<const RankedList>(&list, 1), k);
      EXPECT_EQ(eval.mrr, expect <= k ? 1.0 / expect : 0.0);
      EXPECT_EQ(eval.ndcg, expect <= k ? 1.0 / std::log2(expect + 1.0) : 0.0);
    }
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  EXPECT_EQ(count, 120u);
}

TEST(RankingMetrics, AggregatesArePermutationInvariant) {
  std::vector<RankedList> lists;
  for (std::size_t r : {1u, 3u, 7u, 12u}) {
    RankedList l;
    l.positive_rank = r;
    lists.push_back(l);
  }
  const auto a = ranking_metrics(lists, 10);
  std::reverse(lists.begin(), lists.end());
  const auto b = ranking_metrics(lists, 10);
  EXPECT_DOUBLE_EQ(a.mrr, b.mrr);
  EXPECT_DOUBLE_EQ(a.ndcg, b.ndcg);
  EXPECT_DOUBLE_EQ(a.mrr, (1.0 + 1.0 / 3 + 1.0 / 7) / 4);
  EXPECT_THROW(ranking_metrics({}, 10), ValidationError);
}

ItemCatalog hotel_catalog() {
  using testing::ReviewSpec;
  std::vector<ReviewSpec> specs = {
      {1, "a", "h3", 4, "2020-01-01", "x", 3, "North", 0}, {2, "b", "h3", 4, "2020-01-01", "x", 3, "North", 2},
      {3, "c", "h3", 4, "2020-01-01", "x", 3, "North", 4}, {4, "a", "h4", 4, "2020-01-01", "x", 4, "North", 1},
      {5, "a", "h5", 4, "2020-01-01", "x", 5, "South", 3}, {6, "b", "h5", 4, "2021-06-01", "x", 5, "South", 100},
  };
  const auto c = testing::make_corpus(specs);
  return ItemCatalog::build(c, [](const ReviewRecord& r) { return r.review_id != 6; });
}

TEST(BusinessMetrics, Examples) {
  const auto cat = hotel_catalog();
  EXPECT_EQ(cat.at("h3").review_count, 3u);
  EXPECT_DOUBLE_EQ(cat.at("h3").mean_helpful_votes, 2.0);
  EXPECT_EQ(cat.at("h5").review_count, 1u);  // review 6 is outside the window
  EXPECT_EQ(cat.at("h3").popularity_rank, 1u);

  const std::vector<std::vector<std::string>> lists = {{"h3", "h4", "h5"}};
  const auto b = business_metrics(lists, cat, 3);
  EXPECT_DOUBLE_EQ(b.avg_stars, 4.0);
  EXPECT_DOUBLE_EQ(b.avg_popularity, 5.0 / 3);
  EXPECT_DOUBLE_EQ(b.avg_helpfulness, (2.0 + 1.0 + 3.0) / 3);
  EXPECT_DOUBLE_EQ(b.avg_regional_spread, 2.0);

  const std::vector<std::vector<std::string>> north = {{"h3", "h4"}};
  EXPECT_DOUBLE_EQ(business_metrics(north, cat, 3).avg_regional_spread, 1.0);
  const std::vector<std::vector<std::string>> unknown = {{"nope"}};
  EXPECT_THROW(business_metrics(unknown, cat, 3), ValidationError);
}

TEST(BusinessMetrics, AveragedPerUserFirst) {
  const auto cat = hotel_catalog();
  const std::vector<std::vector<std::string>> lists = {{"h3", "h4", "h5"}, {"h5"}};
  const auto b = business_metrics(lists, cat, 3, true);
  EXPECT_DOUBLE_EQ(b.avg_stars, (4.0 + 5.0) / 2);
  ASSERT_TRUE(b.avg_popularity_rank.has_value());
  EXPECT_EQ(b.per_user_stars.size(), 2u);
}

TEST(Significance, StarBoundariesAreClosed) {
  EXPECT_EQ(significance_stars(0.001), "***");
  EXPECT_EQ(significance_stars(0.0010001), "**");
  EXPECT_EQ(significance_stars(0.05), "**");
  EXPECT_EQ(significance_stars(0.0500001), "*");
  EXPECT_EQ(significance_stars(0.1), "*");
  EXPECT_EQ(significance_stars(0.1000001), "");
  EXPECT_EQ(significance_stars(0.0742), "*");
}

TEST(Significance, PairedExample) {
  const std::vector<double> a = {1, 2, 3}, zero = {0, 0, 0};
  const auto r = paired_t_test(a, zero);
  EXPECT_NEAR(r.t_statistic, 3.46410, 5e-6);
  EXPECT_EQ(r.degrees_of_freedom, 2.0);
  EXPECT_NEAR(r.p_value, 0.07418, 5e-6);
  EXPECT_EQ(r.stars, "*");
  // Closed form for df = 2.
  const double t = std::sqrt(12.0);
  EXPECT_NEAR(r.p_value, 1.0 - t / std::sqrt(2.0 + t * t), 1e-12);
}

TEST(Significance, SymmetryAndShiftInvariance) {
  const std::vector<double> a = {0.3, 1.2, 0.7, 2.5, 1.1}, b = {0.1, 0.9, 0.8, 1.0, 0.2};
  const auto ab = paired_t_test(a, b), ba = paired_t_test(b, a);
  EXPECT_DOUBLE_EQ(ab.t_statistic, -ba.t_statistic);
  EXPECT_DOUBLE_EQ(ab.p_value, ba.p_value);
  std::vector<double> a2 = a, b2 = b;
  for (auto& x : a2) x += 10;
  for (auto& x : b2) x += 10;
  EXPECT_NEAR(paired_t_test(a2, b2).t_statistic, ab.t_statistic, 1e-9);
}

TEST(Significance, DegenerateDifferences) {
  const std::vector<double> a = {1, 2, 3};
  const auto same = paired_t_test(a, a);
  EXPECT_TRUE(same.no_difference);
  EXPECT_EQ(same.p_value, 1.0);
  EXPECT_EQ(same.stars, "");
  const std::vector<double> shifted = {2, 3, 4};
  const auto constant = paired_t_test(shifted, a);
  EXPECT_TRUE(std::isinf(constant.t_statistic));
  EXPECT_EQ(constant.p_value, 0.0);
  EXPECT_EQ(constant.stars, "***");
  const std::vector<double> one = {1};
  EXPECT_THROW(paired_t_test(one, one), ValidationError);
}

// Two-sided tail by Simpson integration of the Student-t density.
double integrated_p(double t, double df) {
  const double c = std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2)) / std::sqrt(df * M_PI);
  auto f = [&](double x) { return c * std::pow(1 + x * x / df, -(df + 1) / 2); };
  const int n = 200000;
  const double h = std::abs(t) / n;
  double s = f(0) + f(std::abs(t));
  for (int j = 1; j < n; ++j) s += (j % 2 ? 4 : 2) * f(j * h);
  return 1.0 - 2.0 * s * h / 3.0;
}

TEST(Significance, MatchesNumericalIntegration) {
  for (double df : {5.0, 30.0}) {
    for (double t : {0.3, 1.0, 2.0, 2.7, 4.5}) {
      EXPECT_NEAR(student_t_two_sided_p(t, df), integrated_p(t, df), 1e-6) << "df " << df << " t " << t;
      EXPECT_DOUBLE_EQ(student_t_two_sided_p(-t, df), student_t_two_sided_p(t, df));
    }
  }
}

TEST(Significance, WelchAgainstHandComputation) {
  const std::vector<double> a = {1, 2, 3, 4}, b = {2, 4, 6};
  // var a = 5/3, var b = 4; se^2 = 5/12 + 4/3.
  const double se2 = 5.0 / 12 + 4.0 / 3;
  const auto r = welch_t_test(a, b);
  EXPECT_NEAR(r.t_statistic, (2.5 - 4.0) / std::sqrt(se2), 1e-12);
  const double df = se2 * se2 / ((5.0 / 12) * (5.0 / 12) / 3 + (4.0 / 3) * (4.0 / 3) / 2);
  EXPECT_NEAR(r.degrees_of_freedom, df, 1e-12);
}

TEST(PercentChange, Rendering) {
  EXPECT_EQ(render_percent_change(1.154, 1.014, MetricDirection::kLowerIsBetter), "12.1% reduction");
  EXPECT_EQ(render_percent_change(0.061, 0.078, MetricDirection::kHigherIsBetter), "27.9% improvement");
  EXPECT_DOUBLE_EQ(percent_change(2.0, 2.0, MetricDirection::kLowerIsBetter), 0.0);
  EXPECT_THROW(percent_change(0.0, 1.0, MetricDirection::kLowerIsBetter), ValidationError);
}

}  // namespace
}  // namespace revlab
