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

#include "revlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>

#include <boost/math/special_functions/beta.hpp>

#include "revlab/error.hpp"

namespace revlab {
namespace {

double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_variance(std::span<const double> v, double m) {
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return ss / static_cast<double>(v.size() - 1);
}

SignificanceResult from_t(double t, double df, double mean_diff) {
  SignificanceResult r;
  r.t_statistic = t;
  r.degrees_of_freedom = df;
  r.mean_difference = mean_diff;
  r.p_value = student_t_two_sided_p(t, df);
  r.stars = significance_stars(r.p_value);
  return r;
}

SignificanceResult degenerate(double mean_diff, double df) {
  SignificanceResult r;
  r.degrees_of_freedom = df;
  r.mean_difference = mean_diff;
  if (mean_diff == 0.0) {
    r.no_difference = true;
    r.t_statistic = 0.0;
    r.p_value = 1.0;
  } else {
    r.t_statistic = mean_diff > 0 ? std::numeric_limits<double>::infinity()
                                  : -std::numeric_limits<double>::infinity();
    r.p_value = 0.0;
  }
  r.stars = significance_stars(r.p_value);
  return r;
}

}  // namespace

RatingEval rating_metrics(std::span<const double> predictions, std::span<const double> targets) {
  if (predictions.empty()) throw ValidationError("rating_metrics: empty input");
  if (predictions.size() != targets.size()) {
    throw ValidationError("rating_metrics: predictions and targets differ in length");
  }
  RatingEval e;
  e.squared_errors.reserve(predictions.size());
  e.absolute_errors.reserve(predictions.size());
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double r = predictions[i] - targets[i];
    e.squared_errors.push_back(r * r);
    e.absolute_errors.push_back(std::abs(r));
  }
  e.rmse = std::sqrt(mean(e.squared_errors));
  e.mae = mean(e.absolute_errors);
  return e;
}

RankedList rank_candidates(std::string user_id, std::span<const std::string> items,
                           std::span<const double> scores, const std::string& positive) {
  if (items.size() != scores.size()) {
    throw ValidationError("rank_candidates: items and scores differ in length");
  }
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return items[a] < items[b];
  });
  RankedList list;
  list.user_id = std::move(user_id);
  list.candidates.reserve(items.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    list.candidates.push_back(items[order[pos]]);
    if (items[order[pos]] == positive) {
      if (list.positive_rank != 0) {
        throw ValidationError("rank_candidates: positive item listed twice");
      }
      list.positive_rank = pos + 1;
    }
  }
  if (list.positive_rank == 0) throw ValidationError("rank_candidates: positive item missing");
  return list;
}

double reciprocal_rank_at(std::size_t rank, std::size_t k) {
  return (rank >= 1 && rank <= k) ? 1.0 / static_cast<double>(rank) : 0.0;
}

double ndcg_at(std::size_t rank, std::size_t k) {
  // One relevant item: IDCG = 1.
  return (rank >= 1 && rank <= k) ? 1.0 / std::log2(static_cast<double>(rank) + 1.0) : 0.0;
}

RankingEval ranking_metrics(std::span<const RankedList> lists, std::size_t k) {
  if (lists.empty()) throw ValidationError("ranking_metrics: no ranked lists");
  if (k == 0) throw ValidationError("ranking_metrics: k must be positive");
  RankingEval e;
  e.k = k;
  for (const auto& l : lists) {
    e.per_list_rr.push_back(reciprocal_rank_at(l.positive_rank, k));
    e.per_list_ndcg.push_back(ndcg_at(l.positive_rank, k));
  }
  e.mrr = mean(e.per_list_rr);
  e.ndcg = mean(e.per_list_ndcg);
  return e;
}

ItemCatalog ItemCatalog::build(const Corpus& c,
                               const std::function<bool(const ReviewRecord&)>& in_training_period) {
  ItemCatalog cat;
  std::map<std::string, double> helpful_sum;
  for (const auto& r : c.records()) {
    auto [it, inserted] = cat.items_.try_emplace(r.item_id);
    if (inserted) {
      it->second.hotel_class = r.hotel.hotel_class;
      it->second.region = r.hotel.region;
    }
    if (in_training_period && !in_training_period(r)) continue;
    ++it->second.review_count;
    helpful_sum[r.item_id] += static_cast<double>(r.helpful_votes);
  }
  std::vector<std::pair<std::size_t, std::string>> by_count;
  for (auto& [item, stats] : cat.items_) {
    if (stats.review_count > 0) {
      stats.mean_helpful_votes = helpful_sum[item] / static_cast<double>(stats.review_count);
    }
    by_count.emplace_back(stats.review_count, item);
  }
  std::sort(by_count.begin(), by_count.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (std::size_t i = 0; i < by_count.size(); ++i) {
    cat.items_[by_count[i].second].popularity_rank = i + 1;
  }
  return cat;
}

const ItemStats& ItemCatalog::at(const std::string& item) const {
  auto it = items_.find(item);
  if (it == items_.end()) throw ValidationError("no catalog metadata for item " + item);
  return it->second;
}

BusinessEval business_metrics(std::span<const std::vector<std::string>> top_lists,
                              const ItemCatalog& catalog, std::size_t k,
                              bool include_popularity_rank) {
  if (top_lists.empty()) throw ValidationError("business_metrics: no recommendation lists");
  if (k == 0) throw ValidationError("business_metrics: k must be positive");
  BusinessEval e;
  e.k = k;
  for (const auto& list : top_lists) {
    const std::size_t n = std::min(k, list.size());
    if (n == 0) throw ValidationError("business_metrics: empty recommendation list");
    double stars = 0.0, popularity = 0.0, helpful = 0.0, rank = 0.0;
    std::set<std::string> regions;
    for (std::size_t j = 0; j < n; ++j) {
      const ItemStats& s = catalog.at(list[j]);
      stars += s.hotel_class;
      popularity += static_cast<double>(s.review_count);
      helpful += s.mean_helpful_votes;
      rank += static_cast<double>(s.popularity_rank);
      regions.insert(s.region);
    }
    const double dn = static_cast<double>(n);
    e.per_user_stars.push_back(stars / dn);
    e.per_user_popularity.push_back(popularity / dn);
    e.per_user_helpfulness.push_back(helpful / dn);
    e.per_user_regional_spread.push_back(static_cast<double>(regions.size()));
    if (include_popularity_rank) e.per_user_popularity_rank.push_back(rank / dn);
  }
  e.avg_stars = mean(e.per_user_stars);
  e.avg_popularity = mean(e.per_user_popularity);
  e.avg_helpfulness = mean(e.per_user_helpfulness);
  e.avg_regional_spread = mean(e.per_user_regional_spread);
  if (include_popularity_rank) e.avg_popularity_rank = mean(e.per_user_popularity_rank);
  return e;
}

std::string significance_stars(double p) {
  if (p <= 0.001) return "***";
  if (p <= 0.05) return "**";
  if (p <= 0.1) return "*";
  return "";
}

double student_t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw ValidationError("student t: degrees of freedom must be positive");
  if (std::isnan(t)) return 1.0;
  if (std::isinf(t)) return 0.0;
  // P(|T| > |t|) = I_{df/(df+t^2)}(df/2, 1/2)
  const double x = df / (df + t * t);
  return boost::math::ibeta(df / 2.0, 0.5, x);
}

SignificanceResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("paired_t_test: samples differ in length");
  if (a.size() < 2) throw ValidationError("paired_t_test: need at least two pairs");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  const double n = static_cast<double>(d.size());
  const double m = mean(d);
  const double var = sample_variance(d, m);
  const double df = n - 1.0;
  if (var == 0.0) return degenerate(m, df);
  return from_t(m / std::sqrt(var / n), df, m);
}

SignificanceResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    throw ValidationError("welch_t_test: each sample needs at least two values");
  }
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ma = mean(a);
  const double mb = mean(b);
  const double va = sample_variance(a, ma) / na;
  const double vb = sample_variance(b, mb) / nb;
  const double se2 = va + vb;
  if (se2 == 0.0) return degenerate(ma - mb, na + nb - 2.0);
  const double df = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  return from_t((ma - mb) / std::sqrt(se2), df, ma - mb);
}

nlohmann::json to_json(const SignificanceResult& s) {
  nlohmann::json t;
  if (std::isinf(s.t_statistic)) {
    t = s.t_statistic > 0 ? "inf" : "-inf";
  } else {
    t = s.t_statistic;
  }
  return {{"t", t},
          {"df", s.degrees_of_freedom},
          {"p", s.p_value},
          {"stars", s.stars},
          {"no_difference", s.no_difference},
          {"mean_difference", s.mean_difference}};
}

double percent_change(double baseline, double treatment, MetricDirection direction) {
  if (baseline == 0.0) throw ValidationError("percent_change: zero baseline");
  const double delta =
      direction == MetricDirection::kLowerIsBetter ? baseline - treatment : treatment - baseline;
  return 100.0 * delta / baseline;
}

std::string render_percent_change(double baseline, double treatment, MetricDirection direction) {
  const double pct = percent_change(baseline, treatment, direction);
  const bool better = pct >= 0.0;
  const char* word = direction == MetricDirection::kLowerIsBetter
                         ? (better ? "reduction" : "increase")
                         : (better ? "improvement" : "decline");
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f%% %s", std::abs(pct), word);
  return buf;
}

}  // namespace revlab
