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


#include "revlab/synthetic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "revlab/error.hpp"
#include "revlab/rng.hpp"

namespace revlab {
namespace {

using Matrix = std::vector<std::vector<double>>;

Matrix gaussian(std::size_t rows, std::size_t cols, double sd, Rng& rng) {
  Matrix m(rows, std::vector<double>(cols));
  for (auto& row : m) {
    for (auto& x : row) x = rng.normal(0.0, sd);
  }
  return m;
}

Date day_offset(int days) {
  using namespace std::chrono;
  const year_month_day ymd{sys_days{year{2015} / January / 1} + std::chrono::days{days}};
  return {static_cast<int>(ymd.year()), static_cast<int>(static_cast<unsigned>(ymd.month())),
          static_cast<int>(static_cast<unsigned>(ymd.day()))};
}

std::string padded(const char* prefix, std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%04zu", prefix, n);
  return buf;
}

}  // namespace

SyntheticData make_synthetic(const SyntheticSpec& spec, const std::string& label) {
  if (spec.users == 0 || spec.items == 0 || spec.topic_dim == 0 || spec.embedding_dim == 0) {
    throw ValidationError("synthetic spec: sizes must be positive");
  }
  if (spec.min_reviews > spec.items || !(spec.mean_extra_reviews >= 0.0)) {
    throw ValidationError("synthetic spec: bad per-user review counts");
  }
  const std::size_t t = spec.topic_dim;
  const std::size_t d = spec.embedding_dim;
  Rng topic_rng(derive_seed(spec.seed, "topics"));
  Matrix user_topics = gaussian(spec.users, t, spec.topic_sd, topic_rng);
  Matrix item_topics = gaussian(spec.items, t, spec.topic_sd, topic_rng);
  for (auto* m : {&user_topics, &item_topics}) {
    for (auto& row : *m) {
      for (auto& x : row) x += spec.topic_mean;
    }
  }
  // Moments of <a, b> for independent components, used to standardize.
  const double mu2 = spec.topic_mean * spec.topic_mean;
  const double s2 = spec.topic_sd * spec.topic_sd;
  const double affinity_mean = static_cast<double>(t) * mu2;
  const double affinity_sd = std::sqrt(static_cast<double>(t) * (s2 * s2 + 2.0 * mu2 * s2));
  if (!(affinity_sd > 0.0)) throw ValidationError("synthetic spec: degenerate topic spread");

  Rng proj_rng(derive_seed(spec.seed, "projection"));
  const double proj_sd = 1.0 / std::sqrt(static_cast<double>(t) * (mu2 + s2));
  const Matrix user_proj = gaussian(d, t, proj_sd, proj_rng);
  const Matrix item_proj = gaussian(d, t, proj_sd, proj_rng);
  std::vector<double> offset(d);
  for (auto& x : offset) x = (proj_rng.uniform01() < 0.5 ? -1.0 : 1.0) * spec.mean_offset;

  Rng hotel_rng(derive_seed(spec.seed, "hotels"));
  std::vector<HotelInfo> hotels(spec.items);
  for (std::size_t i = 0; i < spec.items; ++i) {
    hotels[i].name = "Hotel " + std::to_string(i + 1);
    const std::size_t region = hotel_rng.uniform_below(spec.regions);
    hotels[i].region = "Region " + std::to_string(region + 1);
    hotels[i].locality = "Town " + std::to_string(region + 1) + "-" +
                         std::to_string(hotel_rng.uniform_below(4) + 1);
    hotels[i].hotel_class = 1.0 + static_cast<double>(hotel_rng.uniform_below(9)) * 0.5;
  }

  Rng event_rng(derive_seed(spec.seed, "events"));
  Rng noise_rng(derive_seed(spec.seed, "noise"));
  std::vector<ReviewRecord> records;
  const double stop = 1.0 / (1.0 + spec.mean_extra_reviews);
  EmbeddingStore store(static_cast<std::uint32_t>(d), "synthetic:" + label);
  std::vector<std::size_t> pool(spec.items);
  std::vector<float> vec(d);
  ReviewId next_id = 1;
  for (std::size_t u = 0; u < spec.users; ++u) {
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    std::size_t count = spec.min_reviews;
    while (count < spec.items && event_rng.uniform01() >= stop) ++count;
    for (std::size_t j = 0; j < count; ++j) {
      std::swap(pool[j], pool[j + event_rng.uniform_below(pool.size() - j)]);
      const std::size_t i = pool[j];
      double affinity = 0.0;
      for (std::size_t c = 0; c < t; ++c) affinity += user_topics[u][c] * item_topics[i][c];
      const double raw = 3.0 + spec.rating_spread * (affinity - affinity_mean) / affinity_sd +
                         noise_rng.normal(0.0, spec.rating_noise);
      const int rating = static_cast<int>(std::clamp<long long>(std::llround(raw), 1, 5));

      ReviewRecord r;
      r.review_id = next_id++;
      r.user_id = padded("u", u + 1);
      r.item_id = padded("h", i + 1);
      r.overall_rating = rating;
      r.review_date = day_offset(static_cast<int>(event_rng.uniform_below(5 * 365)));
      r.stay_date = YearMonth{r.review_date.year, r.review_date.month};
      r.helpful_votes = static_cast<std::int64_t>(event_rng.uniform_below(5));
      const char* tone = rating >= 4 ? "great stay and lovely room"
                                     : (rating <= 2 ? "bad stay and dirty room"
                                                    : "average stay and okay room");
      r.text = std::string(tone) + " at " + hotels[i].name;
      r.hotel = hotels[i];
      records.push_back(std::move(r));

      for (std::size_t c = 0; c < d; ++c) {
        double x = offset[c] + noise_rng.normal(0.0, spec.embedding_noise);
        for (std::size_t k = 0; k < t; ++k) {
          x += user_proj[c][k] * user_topics[u][k] + item_proj[c][k] * item_topics[i][k];
        }
        vec[c] = static_cast<float>(x);
      }
      store.insert(records.back().review_id, vec);
    }
  }
  return {Corpus(label, std::move(records)), std::move(store)};
}

EmbeddingStore homogenize(const EmbeddingStore& store, double retain, std::string source_tag) {
  if (!(retain >= 0.0 && retain <= 1.0)) {
    throw ValidationError("homogenize: retain must lie in [0, 1]");
  }
  const std::size_t d = store.dim();
  std::vector<double> mean(d, 0.0);
  for (ReviewId id : store.ids()) {
    auto v = store.at(id);
    for (std::size_t c = 0; c < d; ++c) mean[c] += v[c];
  }
  if (store.size() > 0) {
    for (auto& m : mean) m /= static_cast<double>(store.size());
  }
  EmbeddingStore out(store.dim(), std::move(source_tag));
  std::vector<float> vec(d);
  for (ReviewId id : store.ids()) {
    auto v = store.at(id);
    for (std::size_t c = 0; c < d; ++c) {
      vec[c] = static_cast<float>(mean[c] + retain * (v[c] - mean[c]));
    }
    out.insert(id, vec);
  }
  return out;
}

}  // namespace revlab
