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

#ifndef REVLAB_EMBEDDINGS_HPP_
#define REVLAB_EMBEDDINGS_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "revlab/corpus.hpp"

namespace revlab {

// Per-review sentence vectors. On disk (REVEMB01, little-endian):
//   bytes 0-7  "REVEMB01"
//   u32        dim
//   u64        count
//   count x (u64 review_id, dim x f32), ascending by review_id
class EmbeddingStore {
 public:
  EmbeddingStore() = default;
  EmbeddingStore(std::uint32_t dim, std::string source_tag);

  // Entries may be added in any order; the store keeps them sorted by id.
  // Rejects wrong length, non-finite components and duplicate ids.
  void insert(ReviewId id, std::span<const float> vector);

  std::uint32_t dim() const { return dim_; }
  std::size_t size() const { return ids_.size(); }
  const std::string& source_tag() const { return source_tag_; }
  const std::vector<ReviewId>& ids() const { return ids_; }

  bool contains(ReviewId id) const { return index_.contains(id); }
  // Throws ValidationError when absent.
  std::span<const float> at(ReviewId id) const;

 private:
  std::uint32_t dim_ = 0;
  std::string source_tag_;
  std::vector<ReviewId> ids_;
  std::vector<float> data_;
  std::unordered_map<ReviewId, std::size_t> index_;
};

EmbeddingStore open_store(const std::filesystem::path& path);
void write_store(const std::filesystem::path& path, const EmbeddingStore& store);

// Offline stand-in for a sentence encoder: unit-norm vector drawn from a
// normal stream keyed by (seed, hash of lowercased, whitespace-collapsed text).
std::vector<float> stub_embed(std::string_view text, std::uint64_t seed, std::uint32_t dim);

// Stub vectors for every record of a corpus; every record needs text.
EmbeddingStore stub_store(const Corpus& c, std::uint64_t seed, std::uint32_t dim);

enum class Side { kUser, kItem };

// k most recent prior reviews, flattened most-recent-first into k*d doubles.
// Slots at and beyond present_count are zero.
struct HistoryWindow {
  std::size_t k = 0;
  std::size_t dim = 0;
  std::size_t present_count = 0;
  std::vector<ReviewId> review_ids;  // the present_count selected ids
  std::vector<double> values;        // k * dim

  std::span<const double> slot(std::size_t j) const {
    return std::span<const double>(values).subspan(j * dim, dim);
  }
};

// Per-entity timelines over a pool of reviews. Selection looks only at
// metadata (dates and ids), never at vectors, so two aligned corpora select
// identical review ids.
class HistoryIndex {
 public:
  using Filter = std::function<bool(const ReviewRecord&)>;

  // The filter restricts which reviews may ever appear in a history.
  HistoryIndex(const Corpus& c, Side side, const Filter& filter = {});

  // Up to k ids of `key` strictly before `before`, most recent first.
  std::vector<ReviewId> select(const std::string& key, const EventKey& before,
                               std::size_t k) const;

 private:
  std::unordered_map<std::string, std::vector<EventKey>> timelines_;
};

HistoryWindow materialize(std::span<const ReviewId> selected, const EmbeddingStore& store,
                          std::size_t k);

HistoryWindow assemble_history(const Corpus& c, const EmbeddingStore& store, Side side,
                               const std::string& key, const EventKey& before,
                               std::size_t k);

}  // namespace revlab

#endif  // REVLAB_EMBEDDINGS_HPP_
