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

// Text-level comparison of a base corpus against an aligned counterpart:
// internal embedding similarity, lexical diversity, lexicon sentiment and
// dominant-emotion distributions, with the matching significance tests.

#ifndef REVLAB_TEXTSTATS_HPP_
#define REVLAB_TEXTSTATS_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "revlab/corpus.hpp"
#include "revlab/embeddings.hpp"

namespace revlab {

// Uniform sample without replacement, returned in ascending id order.
std::vector<ReviewId> sample_reviews(const Corpus& c, std::size_t n, std::uint64_t seed);

struct SimilaritySample {
  std::vector<ReviewId> review_ids;
  std::vector<double> pairwise_cosines;  // i < j, row-major; empty if not retained
  std::size_t pair_count = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation over pairs
};

// Cosine over all unique pairs; vectors normalized on the fly.
SimilaritySample internal_similarity(const EmbeddingStore& store, std::span<const ReviewId> ids,
                                     bool retain_pairs = true);

using StopwordSet = std::unordered_set<std::string>;

// Bundled 100-word English list.
const StopwordSet& default_stopwords();
StopwordSet load_stopwords(const std::filesystem::path& path);

// Distinct / total over non-stopword tokens; nullopt when nothing remains.
std::optional<double> lexical_diversity(std::string_view text, const StopwordSet& stopwords);

using Lexicon = std::unordered_map<std::string, double>;

// UTF-8 "token<TAB>valence" lines; '#' starts a comment line.
Lexicon load_lexicon(const std::filesystem::path& path);
Lexicon parse_lexicon(std::istream& in);

struct Polarity {
  double pos = 0.0;
  double neu = 0.0;
  double neg = 0.0;
};

// Token shares: valence >= threshold positive, <= -threshold negative, rest
// (including unknown tokens) neutral.
Polarity sentiment_polarity(std::string_view text, const Lexicon& lexicon,
                            double threshold = 0.5);

// The 28 categories a dominant-emotion label may take.
const std::vector<std::string>& emotion_categories();

// JSONL rows: {review_id, dominant_emotion} and/or {review_id, pos, neu, neg}.
struct LabelFile {
  std::map<ReviewId, std::string> emotions;
  std::map<ReviewId, Polarity> sentiments;
};

LabelFile load_label_file(const std::filesystem::path& path);
LabelFile parse_label_file(std::istream& in, std::string_view source_name = "<stream>");

struct EmotionDistribution {
  std::map<std::string, std::size_t> counts;
  std::map<std::string, double> frequencies;
  std::size_t distinct_categories = 0;
  std::size_t total = 0;
};

EmotionDistribution emotion_distribution(const LabelFile& labels, std::span<const ReviewId> ids);

enum class SentimentSource { kLexicon, kLabelFile };

struct ComparisonConfig {
  SentimentSource sentiment_source = SentimentSource::kLexicon;
  Lexicon lexicon;
  double valence_threshold = 0.5;
  StopwordSet stopwords = default_stopwords();
  const LabelFile* base_labels = nullptr;   // emotions and/or external sentiment
  const LabelFile* other_labels = nullptr;
};

struct CorpusSide {
  const Corpus* corpus = nullptr;
  const EmbeddingStore* store = nullptr;
};

// Full comparison over one shared id sample. Corpora must be aligned.
nlohmann::json corpus_comparison_report(const CorpusSide& base, const CorpusSide& other,
                                        std::span<const ReviewId> sample,
                                        const ComparisonConfig& config);

// Per-review feature rows for external plotting:
// review_id,corpus,lexical_diversity,pos,neu,neg,dominant_emotion
std::string feature_rows_csv(const CorpusSide& side, std::span<const ReviewId> sample,
                             const ComparisonConfig& config, const LabelFile* labels);

}  // namespace revlab

#endif  // REVLAB_TEXTSTATS_HPP_
