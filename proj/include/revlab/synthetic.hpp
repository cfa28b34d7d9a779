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


// Planted-signal corpora for direction-of-effect checks. Each user and item
// carries a latent topic vector; ratings follow their affinity and review
// vectors encode both topics plus a shared offset, so review histories carry
// information that identifier embeddings must otherwise learn from ratings.

#ifndef REVLAB_SYNTHETIC_HPP_
#define REVLAB_SYNTHETIC_HPP_

#include <cstdint>

#include "revlab/corpus.hpp"
#include "revlab/embeddings.hpp"

namespace revlab {

struct SyntheticSpec {
  std::size_t users = 500;
  std::size_t items = 200;
  // Per-user activity: min_reviews plus a geometric number of extra reviews
  // with the given mean, so most users are thinly observed.
  std::size_t min_reviews = 5;
  double mean_extra_reviews = 5.0;
  std::size_t topic_dim = 8;
  std::uint32_t embedding_dim = 32;
  // Topic components are Normal(topic_mean, topic_sd). A positive mean gives
  // users and items main effects on top of the pure interaction.
  double topic_mean = 1.0;
  double topic_sd = 1.0;
  // rating = round(3 + spread * standardized <a_u, b_i> + noise), clipped.
  double rating_spread = 1.0;
  double rating_noise = 0.25;    // standard deviation
  double embedding_noise = 0.1;  // standard deviation per component
  double mean_offset = 0.8;      // per-component magnitude of the shared offset
  std::size_t regions = 8;
  std::uint64_t seed = 42;
};

struct SyntheticData {
  Corpus corpus;
  EmbeddingStore store;
};

SyntheticData make_synthetic(const SyntheticSpec& spec, const std::string& label = "synthetic");

// Moves every vector toward the store mean, keeping `retain` of its deviation.
EmbeddingStore homogenize(const EmbeddingStore& store, double retain, std::string source_tag);

}  // namespace revlab

#endif  // REVLAB_SYNTHETIC_HPP_
