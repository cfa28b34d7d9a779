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

#include "revlab/textstats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "revlab/digest.hpp"
#include "revlab/error.hpp"
#include "revlab/metrics.hpp"
#include "revlab/rng.hpp"
#include "revlab/simd/kernels.hpp"
#include "revlab/text.hpp"

namespace revlab {
namespace {

struct Moments {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }
  double stddev() const { return n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1)) : 0.0; }
};

nlohmann::json summary(std::span<const double> v) {
  Moments m;
  for (double x : v) m.add(x);
  return {{"n", m.n}, {"mean", m.mean}, {"std", m.stddev()}};
}

const std::string& require_text(const Corpus& c, ReviewId id) {
  const ReviewRecord* r = c.find(id);
  if (r == nullptr) {
    throw ValidationError("review_id " + std::to_string(id) + " not in corpus '" + c.label() + "'");
  }
  if (!r->text) {
    throw ValidationError("review_id " + std::to_string(id) + " in corpus '" + c.label() +
                          "' has no text");
  }
  return *r->text;
}

Polarity polarity_for(const CorpusSide& side, ReviewId id, const ComparisonConfig& cfg,
                      const LabelFile* labels) {
  if (cfg.sentiment_source == SentimentSource::kLabelFile) {
    if (labels == nullptr) throw ValidationError("external sentiment mode needs a label file");
    auto it = labels->sentiments.find(id);
    if (it == labels->sentiments.end()) {
      throw ValidationError("review_id " + std::to_string(id) + " missing from sentiment labels");
    }
    return it->second;
  }
  return sentiment_polarity(require_text(*side.corpus, id), cfg.lexicon, cfg.valence_threshold);
}

nlohmann::json emotion_json(const EmotionDistribution& d) {
  return {{"counts", d.counts},
          {"frequencies", d.frequencies},
          {"distinct_categories", d.distinct_categories},
          {"total", d.total}};
}

}  // namespace

std::vector<ReviewId> sample_reviews(const Corpus& c, std::size_t n, std::uint64_t seed) {
  if (n > c.size()) {
    throw ValidationError("cannot sample " + std::to_string(n) + " reviews from a corpus of " +
                          std::to_string(c.size()));
  }
  std::vector<ReviewId> ids;
  ids.reserve(c.size());
  for (const auto& r : c.records()) ids.push_back(r.review_id);
  // Canonical order first so the sample does not depend on file order.
  std::sort(ids.begin(), ids.end());
  Rng rng(derive_seed(seed, "sample"));
  for (std::size_t j = 0; j < n; ++j) {
    std::swap(ids[j], ids[j + rng.uniform_below(ids.size() - j)]);
  }
  ids.resize(n);
  std::sort(ids.begin(), ids.end());
  return ids;
}

SimilaritySample internal_similarity(const EmbeddingStore& store, std::span<const ReviewId> ids,
                                     bool retain_pairs) {
  if (ids.size() < 2) throw ValidationError("internal_similarity needs at least two reviews");
  const std::size_t d = store.dim();
  std::vector<double> unit(ids.size() * d);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto v = store.at(ids[i]);
    double norm2 = 0.0;
    for (float x : v) norm2 += static_cast<double>(x) * x;
    if (norm2 == 0.0) {
      throw ValidationError("zero embedding vector for review_id " + std::to_string(ids[i]));
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (std::size_t c = 0; c < d; ++c) unit[i * d + c] = v[c] * inv;
  }
  SimilaritySample s;
  s.review_ids.assign(ids.begin(), ids.end());
  s.pair_count = ids.size() * (ids.size() - 1) / 2;
  if (retain_pairs) s.pairwise_cosines.reserve(s.pair_count);
  const auto& k = simd::active_kernels();
  Moments m;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      double cos = k.dot(&unit[i * d], &unit[j * d], d);
      cos = std::clamp(cos, -1.0, 1.0);
      m.add(cos);
      if (retain_pairs) s.pairwise_cosines.push_back(cos);
    }
  }
  s.mean = m.mean;
  s.stddev = m.stddev();
  return s;
}

const StopwordSet& default_stopwords() {
  static const StopwordSet words = {
      "a",       "about",   "above", "after", "again", "against", "all",   "am",    "an",
      "and",     "any",     "are",   "as",    "at",    "be",      "because", "been", "before",
      "being",   "below",   "between", "both", "but",  "by",      "can",   "could", "did",
      "do",      "does",    "doing", "down",  "during", "each",   "few",   "for",   "from",
      "further", "had",     "has",   "have",  "having", "he",     "her",   "here",  "hers",
      "him",     "his",     "how",   "i",     "if",    "in",      "into",  "is",    "it",
      "its",     "itself",  "just",  "me",    "more",  "most",    "my",    "no",    "nor",
      "not",     "of",      "off",   "on",    "once",  "only",    "or",    "other", "our",
      "out",     "over",    "own",   "same",  "she",   "should",  "so",    "some",  "such",
      "than",    "that",    "the",   "their", "them",  "then",    "there", "these", "they",
      "this",    "those",   "to",    "too",   "very",  "was",     "we",    "were",  "with",
      "you"};
  return words;
}

StopwordSet load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open stopword file " + path.string());
  StopwordSet words;
  std::string line;
  while (std::getline(in, line)) {
    for (auto& tok : text::normalized_tokens(line)) words.insert(std::move(tok));
  }
  return words;
}

std::optional<double> lexical_diversity(std::string_view text, const StopwordSet& stopwords) {
  std::unordered_set<std::string> unique;
  std::size_t total = 0;
  for (auto& tok : text::normalized_tokens(text)) {
    if (stopwords.contains(tok)) continue;
    ++total;
    unique.insert(std::move(tok));
  }
  if (total == 0) return std::nullopt;
  return static_cast<double>(unique.size()) / static_cast<double>(total);
}

Lexicon parse_lexicon(std::istream& in) {
  Lexicon lex;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ValidationError("lexicon line " + std::to_string(line_no) + ": expected token<TAB>valence");
    }
    const std::string token = text::ascii_lower(line.substr(0, tab));
    std::string rest = line.substr(tab + 1);
    if (auto tab2 = rest.find('\t'); tab2 != std::string::npos) rest.resize(tab2);
    try {
      std::size_t used = 0;
      const double v = std::stod(rest, &used);
      if (!std::isfinite(v)) throw std::invalid_argument("non-finite");
      lex[token] = v;
    } catch (const std::exception&) {
      throw ValidationError("lexicon line " + std::to_string(line_no) + ": bad valence '" + rest + "'");
    }
  }
  return lex;
}

Lexicon load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open lexicon " + path.string());
  return parse_lexicon(in);
}

Polarity sentiment_polarity(std::string_view text, const Lexicon& lexicon, double threshold) {
  const auto tokens = text::normalized_tokens(text);
  if (tokens.empty()) throw ValidationError("sentiment_polarity: empty text");
  std::size_t pos = 0, neg = 0;
  for (const auto& tok : tokens) {
    auto it = lexicon.find(tok);
    if (it == lexicon.end()) continue;
    if (it->second >= threshold) ++pos;
    else if (it->second <= -threshold) ++neg;
  }
  const double n = static_cast<double>(tokens.size());
  Polarity p;
  p.pos = static_cast<double>(pos) / n;
  p.neg = static_cast<double>(neg) / n;
  p.neu = static_cast<double>(tokens.size() - pos - neg) / n;
  return p;
}

const std::vector<std::string>& emotion_categories() {
  static const std::vector<std::string> cats = {
      "admiration", "amusement",   "anger",        "annoyance",      "approval",
      "caring",     "confusion",   "curiosity",    "desire",         "disappointment",
      "disapproval", "disgust",    "embarrassment", "excitement",    "fear",
      "gratitude",  "grief",       "joy",          "love",           "nervousness",
      "optimism",   "pride",       "realization",  "relief",         "remorse",
      "sadness",    "surprise",    "neutral"};
  return cats;
}

LabelFile parse_label_file(std::istream& in, std::string_view source_name) {
  const auto& cats = emotion_categories();
  LabelFile out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = std::string(source_name) + ":" + std::to_string(line_no) + ": ";
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(where + "malformed JSON: " + e.what());
    }
    if (!j.is_object() || !j.contains("review_id") || !j["review_id"].is_number_integer()) {
      throw ValidationError(where + "missing integer review_id");
    }
    const auto id = j["review_id"].get<ReviewId>();
    bool used = false;
    if (j.contains("dominant_emotion")) {
      const auto label = j["dominant_emotion"].get<std::string>();
      if (std::find(cats.begin(), cats.end(), label) == cats.end()) {
        throw ValidationError(where + "unknown emotion category '" + label + "'");
      }
      out.emotions[id] = label;
      used = true;
    }
    if (j.contains("pos") || j.contains("neu") || j.contains("neg")) {
      Polarity p;
      try {
        p.pos = j.at("pos").get<double>();
        p.neu = j.at("neu").get<double>();
        p.neg = j.at("neg").get<double>();
      } catch (const nlohmann::json::exception&) {
        throw ValidationError(where + "sentiment rows need numeric pos, neu and neg");
      }
      if (p.pos < 0 || p.neu < 0 || p.neg < 0 || std::abs(p.pos + p.neu + p.neg - 1.0) > 1e-6) {
        throw ValidationError(where + "pos+neu+neg must be non-negative and sum to 1");
      }
      out.sentiments[id] = p;
      used = true;
    }
    if (!used) throw ValidationError(where + "row carries neither an emotion nor sentiment scores");
  }
  return out;
}

LabelFile load_label_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open label file " + path.string());
  return parse_label_file(in, path.string());
}

EmotionDistribution emotion_distribution(const LabelFile& labels, std::span<const ReviewId> ids) {
  EmotionDistribution d;
  for (ReviewId id : ids) {
    auto it = labels.emotions.find(id);
    if (it == labels.emotions.end()) {
      throw ValidationError("review_id " + std::to_string(id) + " missing from emotion labels");
    }
    ++d.counts[it->second];
  }
  d.total = ids.size();
  d.distinct_categories = d.counts.size();
  for (const auto& [label, count] : d.counts) {
    d.frequencies[label] = static_cast<double>(count) / static_cast<double>(d.total);
  }
  return d;
}

nlohmann::json corpus_comparison_report(const CorpusSide& base, const CorpusSide& other,
                                        std::span<const ReviewId> sample,
                                        const ComparisonConfig& config) {
  if (base.corpus == nullptr || other.corpus == nullptr) {
    throw ValidationError("comparison needs both corpora");
  }
  align_corpora(*base.corpus, *other.corpus);

  nlohmann::json report;
  report["base"] = base.corpus->label();
  report["other"] = other.corpus->label();
  std::ostringstream id_text;
  for (ReviewId id : sample) id_text << id << '\n';
  report["sample"] = {{"n", sample.size()}, {"ids_sha256", sha256_hex(id_text.str())}};

  if (base.store != nullptr && other.store != nullptr) {
    const auto a = internal_similarity(*base.store, sample, false);
    const auto b = internal_similarity(*other.store, sample, false);
    // Welch from moments: pairs are not matched across corpora.
    SignificanceResult test;
    const double na = static_cast<double>(a.pair_count);
    const double nb = static_cast<double>(b.pair_count);
    const double va = a.stddev * a.stddev / na;
    const double vb = b.stddev * b.stddev / nb;
    if (va + vb == 0.0) {
      test.mean_difference = a.mean - b.mean;
      test.degrees_of_freedom = na + nb - 2.0;
      test.no_difference = a.mean == b.mean;
      test.t_statistic = test.no_difference ? 0.0 : std::copysign(INFINITY, a.mean - b.mean);
      test.p_value = test.no_difference ? 1.0 : 0.0;
    } else {
      test.degrees_of_freedom =
          (va + vb) * (va + vb) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
      test.t_statistic = (a.mean - b.mean) / std::sqrt(va + vb);
      test.mean_difference = a.mean - b.mean;
      test.p_value = student_t_two_sided_p(test.t_statistic, test.degrees_of_freedom);
    }
    test.stars = significance_stars(test.p_value);
    report["internal_similarity"] = {
        {"base", {{"pairs", a.pair_count}, {"mean", a.mean}, {"std", a.stddev}}},
        {"other", {{"pairs", b.pair_count}, {"mean", b.mean}, {"std", b.stddev}}},
        {"test", to_json(test)},
        {"test_kind", "welch"}};
  }

  {
    std::vector<double> la, lb;
    std::vector<ReviewId> skipped;
    for (ReviewId id : sample) {
      auto da = lexical_diversity(require_text(*base.corpus, id), config.stopwords);
      auto db = lexical_diversity(require_text(*other.corpus, id), config.stopwords);
      if (!da || !db) {
        skipped.push_back(id);
        continue;
      }
      la.push_back(*da);
      lb.push_back(*db);
    }
    nlohmann::json ld = {{"base", summary(la)}, {"other", summary(lb)}, {"skipped", skipped}};
    if (la.size() >= 2) ld["test"] = to_json(paired_t_test(la, lb));
    ld["test_kind"] = "paired";
    report["lexical_diversity"] = std::move(ld);
  }

  {
    std::vector<double> pa, pb, ua, ub, na, nb;
    for (ReviewId id : sample) {
      const Polarity x = polarity_for(base, id, config, config.base_labels);
      const Polarity y = polarity_for(other, id, config, config.other_labels);
      pa.push_back(x.pos);
      pb.push_back(y.pos);
      ua.push_back(x.neu);
      ub.push_back(y.neu);
      na.push_back(x.neg);
      nb.push_back(y.neg);
    }
    nlohmann::json s;
    auto dim = [&](const char* name, const std::vector<double>& a, const std::vector<double>& b) {
      nlohmann::json d = {{"base", summary(a)}, {"other", summary(b)}};
      if (a.size() >= 2) d["test"] = to_json(paired_t_test(a, b));
      s[name] = std::move(d);
    };
    dim("pos", pa, pb);
    dim("neu", ua, ub);
    dim("neg", na, nb);
    s["source"] = config.sentiment_source == SentimentSource::kLexicon ? "lexicon" : "label_file";
    s["test_kind"] = "paired";
    report["sentiment"] = std::move(s);
  }

  if (config.base_labels != nullptr && config.other_labels != nullptr &&
      !config.base_labels->emotions.empty() && !config.other_labels->emotions.empty()) {
    report["emotions"] = {
        {"base", emotion_json(emotion_distribution(*config.base_labels, sample))},
        {"other", emotion_json(emotion_distribution(*config.other_labels, sample))}};
  }
  return report;
}

std::string feature_rows_csv(const CorpusSide& side, std::span<const ReviewId> sample,
                             const ComparisonConfig& config, const LabelFile* labels) {
  std::ostringstream out;
  out.precision(17);
  for (ReviewId id : sample) {
    const auto ld = lexical_diversity(require_text(*side.corpus, id), config.stopwords);
    const Polarity p = polarity_for(side, id, config, labels);
    std::string emotion;
    if (labels != nullptr) {
      if (auto it = labels->emotions.find(id); it != labels->emotions.end()) emotion = it->second;
    }
    out << id << ',' << side.corpus->label() << ',';
    if (ld) out << *ld;
    out << ',' << p.pos << ',' << p.neu << ',' << p.neg << ',' << emotion << '\n';
  }
  return out.str();
}

}  // namespace revlab
