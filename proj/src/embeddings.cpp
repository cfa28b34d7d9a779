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

#include "revlab/embeddings.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>

#include "revlab/error.hpp"
#include "revlab/rng.hpp"
#include "revlab/text.hpp"

namespace revlab {
namespace {

constexpr std::array<char, 8> kMagic = {'R', 'E', 'V', 'E', 'M', 'B', '0', '1'};
constexpr std::uint64_t kHeaderBytes = 8 + 4 + 8;

template <typename T>
T read_le(const unsigned char* p) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(p[i]) << (8 * i);
  return v;
}

template <typename T>
void write_le(std::ostream& out, T v) {
  unsigned char buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

}  // namespace

EmbeddingStore::EmbeddingStore(std::uint32_t dim, std::string source_tag)
    : dim_(dim), source_tag_(std::move(source_tag)) {
  if (dim_ == 0) throw ValidationError("embedding dim must be positive");
}

void EmbeddingStore::insert(ReviewId id, std::span<const float> vector) {
  if (vector.size() != dim_) {
    throw ValidationError("embedding for review_id " + std::to_string(id) + " has length " +
                          std::to_string(vector.size()) + ", expected " + std::to_string(dim_));
  }
  for (float x : vector) {
    if (!std::isfinite(x)) {
      throw ValidationError("non-finite embedding component for review_id " + std::to_string(id));
    }
  }
  if (index_.contains(id)) {
    throw ValidationError("duplicate embedding for review_id " + std::to_string(id));
  }
  auto pos = std::lower_bound(ids_.begin(), ids_.end(), id);
  const auto row = static_cast<std::size_t>(pos - ids_.begin());
  if (pos == ids_.end()) {
    index_.emplace(id, ids_.size());
    ids_.push_back(id);
    data_.insert(data_.end(), vector.begin(), vector.end());
    return;
  }
  ids_.insert(pos, id);
  data_.insert(data_.begin() + static_cast<std::ptrdiff_t>(row * dim_), vector.begin(),
               vector.end());
  for (std::size_t i = row; i < ids_.size(); ++i) index_[ids_[i]] = i;
}

std::span<const float> EmbeddingStore::at(ReviewId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) {
    throw ValidationError("review_id " + std::to_string(id) + " absent from embedding store '" +
                          source_tag_ + "'");
  }
  return std::span<const float>(data_).subspan(it->second * dim_, dim_);
}

EmbeddingStore open_store(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open embedding file " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  const std::string where = path.string() + ": ";
  if (bytes.size() < kHeaderBytes ||
      !std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw ValidationError(where + "bad magic (expected REVEMB01)");
  }
  const auto dim = read_le<std::uint32_t>(bytes.data() + 8);
  const auto count = read_le<std::uint64_t>(bytes.data() + 12);
  if (dim == 0) throw ValidationError(where + "dim must be positive");
  const std::uint64_t record_bytes = 8 + 4ULL * dim;
  const std::uint64_t payload = bytes.size() - kHeaderBytes;
  if (payload != count * record_bytes) {
    throw ValidationError(where + "declared count " + std::to_string(count) +
                          " does not match payload (" + std::to_string(payload / record_bytes) +
                          " whole records, " + std::to_string(payload) + " bytes)");
  }
  EmbeddingStore store(dim, path.filename().string());
  std::vector<float> vec(dim);
  const unsigned char* p = bytes.data() + kHeaderBytes;
  ReviewId previous = 0;
  for (std::uint64_t r = 0; r < count; ++r, p += record_bytes) {
    const auto id = static_cast<ReviewId>(read_le<std::uint64_t>(p));
    if (r > 0 && id <= previous) {
      throw ValidationError(where + "review ids not strictly ascending at record " +
                            std::to_string(r));
    }
    previous = id;
    for (std::uint32_t c = 0; c < dim; ++c) {
      const auto bits = read_le<std::uint32_t>(p + 8 + 4ULL * c);
      std::memcpy(&vec[c], &bits, 4);
    }
    store.insert(id, vec);
  }
  return store;
}

void write_store(const std::filesystem::path& path, const EmbeddingStore& store) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out.write(kMagic.data(), kMagic.size());
  write_le<std::uint32_t>(out, store.dim());
  write_le<std::uint64_t>(out, store.size());
  for (ReviewId id : store.ids()) {
    write_le<std::uint64_t>(out, static_cast<std::uint64_t>(id));
    for (float x : store.at(id)) {
      std::uint32_t bits;
      std::memcpy(&bits, &x, 4);
      write_le<std::uint32_t>(out, bits);
    }
  }
  if (!out) throw ValidationError("write failed: " + path.string());
}

std::vector<float> stub_embed(std::string_view text, std::uint64_t seed, std::uint32_t dim) {
  if (dim == 0) throw ValidationError("stub dim must be positive");
  std::string normalized;
  for (std::string_view tok : text::split_whitespace(text)) {
    if (!normalized.empty()) normalized.push_back(' ');
    normalized += text::ascii_lower(tok);
  }
  Rng rng(derive_seed(seed, normalized));
  std::vector<double> v(dim);
  double norm2 = 0.0;
  for (auto& x : v) {
    x = rng.normal();
    norm2 += x * x;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  std::vector<float> out(dim);
  for (std::uint32_t i = 0; i < dim; ++i) out[i] = static_cast<float>(v[i] * inv);
  return out;
}

EmbeddingStore stub_store(const Corpus& c, std::uint64_t seed, std::uint32_t dim) {
  EmbeddingStore store(dim, "stub:" + c.label());
  for (const auto& r : c.records()) {
    if (!r.text) {
      throw ValidationError("review_id " + std::to_string(r.review_id) +
                            " has no text to embed");
    }
    store.insert(r.review_id, stub_embed(*r.text, seed, dim));
  }
  return store;
}

HistoryIndex::HistoryIndex(const Corpus& c, Side side, const Filter& filter) {
  for (const auto& r : c.records()) {
    if (filter && !filter(r)) continue;
    const std::string& key = side == Side::kUser ? r.user_id : r.item_id;
    timelines_[key].push_back(event_key(r));
  }
  for (auto& [key, events] : timelines_) std::sort(events.begin(), events.end());
}

std::vector<ReviewId> HistoryIndex::select(const std::string& key, const EventKey& before,
                                           std::size_t k) const {
  std::vector<ReviewId> out;
  auto it = timelines_.find(key);
  if (it == timelines_.end()) return out;
  const auto& events = it->second;
  // Everything in [begin, end) is strictly earlier than `before`.
  auto end = std::lower_bound(events.begin(), events.end(), before);
  while (end != events.begin() && out.size() < k) {
    --end;
    out.push_back(end->review_id);
  }
  return out;
}

HistoryWindow materialize(std::span<const ReviewId> selected, const EmbeddingStore& store,
                          std::size_t k) {
  HistoryWindow w;
  w.k = k;
  w.dim = store.dim();
  w.present_count = std::min(selected.size(), k);
  w.review_ids.assign(selected.begin(), selected.begin() + static_cast<std::ptrdiff_t>(w.present_count));
  w.values.assign(k * w.dim, 0.0);
  for (std::size_t j = 0; j < w.present_count; ++j) {
    auto v = store.at(selected[j]);
    std::copy(v.begin(), v.end(), w.values.begin() + static_cast<std::ptrdiff_t>(j * w.dim));
  }
  return w;
}

HistoryWindow assemble_history(const Corpus& c, const EmbeddingStore& store, Side side,
                               const std::string& key, const EventKey& before,
                               std::size_t k) {
  if (k == 0) throw ValidationError("history length k must be positive");
  HistoryIndex index(c, side);
  return materialize(index.select(key, before, k), store, k);
}

}  // namespace revlab
