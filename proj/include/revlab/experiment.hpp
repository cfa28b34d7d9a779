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


// Scenario orchestration: shared data preparation from one filtered corpus,
// per-scenario training and evaluation, cross train/test grids, metric
// reports, run manifests and their verification, result tables and the
// hyperparameter sweep.

#ifndef REVLAB_EXPERIMENT_HPP_
#define REVLAB_EXPERIMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "revlab/corpus.hpp"
#include "revlab/embeddings.hpp"
#include "revlab/metrics.hpp"
#include "revlab/model.hpp"
#include "revlab/protocol.hpp"

namespace revlab {

inline constexpr const char* kSoftwareVersion = "revlab 1.0.0";

enum class ShortHistoryPolicy { kPad, kDrop };

struct ProtocolConfig {
  int min_interactions = 5;
  FilterMode filter_mode = FilterMode::kFixpoint;
  double validation_fraction = 0.10;
  std::size_t negatives = 99;
  // kDrop removes training and validation instances whose user or item
  // history is shorter than k; test instances are always kept.
  ShortHistoryPolicy short_history = ShortHistoryPolicy::kPad;
  std::vector<std::size_t> ranking_cutoffs = {3, 5, 10, 20};
  std::size_t business_k = 10;
  bool popularity_rank = false;
};

nlohmann::json to_json(const ProtocolConfig& p);

// Everything derived from metadata alone. Built once and shared by every
// scenario, so all cells see the same splits, negatives and history ids.
struct PreparedData {
  SplitPlan plan;
  std::string split_hash;
  std::string selection_digest;  // over every instance's history ids
  IdVocabulary users;            // users with training reviews
  IdVocabulary items;            // items with training reviews
  std::vector<Instance> train;
  std::vector<Instance> validation;
  std::vector<Instance> test;  // one per user, ascending user_id
  std::vector<RankingCase> ranking;
  // Per ranking case: the positive first, then the negatives in plan order.
  std::vector<std::vector<Instance>> candidates;
  ItemCatalog catalog;
};

// `filtered` must already satisfy the interaction filter.
PreparedData prepare_data(const Corpus& filtered, std::uint64_t master_seed,
                          const ProtocolConfig& protocol, std::size_t history_length);

struct EvaluationReport {
  RatingEval rating;
  std::vector<RankingEval> ranking;  // one per cutoff; empty without 5-star tests
  std::optional<BusinessEval> business;
};

EvaluationReport evaluate(const TrainedModel& model, const PreparedData& data,
                          const EmbeddingStore* store, const ProtocolConfig& protocol);

// {scenario, split_hash, metrics: {name: {value, n, per_instance_digest}},
//  per_instance: {name: [...]}}. The per-instance unit of rmse is the squared
// error, of mae the absolute error, of ranking metrics the per-list value and
// of business metrics the per-user value.
nlohmann::json metrics_report(const std::string& scenario, const std::string& split_hash,
                              const EvaluationReport& eval);

struct ScenarioSpec {
  std::string name;
  ModelVariant variant = ModelVariant::kWithReviews;
  std::optional<std::string> train_history;  // corpus label; none for ids_only
  std::optional<std::string> test_history;
  ModelConfig model;
  std::string split_hash;

  void validate() const;
};

nlohmann::json to_json(const ScenarioSpec& s);

// Corpora and stores keyed by label, all filtered and aligned to the base.
struct Workspace {
  std::string base_label;
  std::map<std::string, Corpus> corpora;
  std::map<std::string, EmbeddingStore> stores;
  ProtocolConfig protocol;
  std::uint64_t master_seed = 0;
  std::size_t history_length = 3;
  PreparedData data;

  // Filters every corpus, checks alignment against the base and prepares
  // the shared data.
  static Workspace build(std::map<std::string, Corpus> raw, std::string base_label,
                         std::map<std::string, EmbeddingStore> stores,
                         const ProtocolConfig& protocol, std::uint64_t master_seed,
                         std::size_t history_length);

  const EmbeddingStore* store_for(const std::optional<std::string>& label) const;
};

struct TrainedScenario {
  TrainedModel model;
  TrainResult training;
};

TrainedScenario train_scenario(const Workspace& ws, const ScenarioSpec& spec);

struct ScenarioOutcome {
  ScenarioSpec spec;
  TrainResult training;
  TrainedModel model;
  EvaluationReport evaluation;
  nlohmann::json report;
};

// Throws ReproducibilityError when spec.split_hash differs from the
// workspace split.
ScenarioOutcome run_scenario(const Workspace& ws, const ScenarioSpec& spec);

struct CrossCell {
  std::string train_source;
  std::string test_source;
  std::string checkpoint_digest;
  EvaluationReport evaluation;
  nlohmann::json report;
};

struct CrossMatrix {
  std::vector<std::string> sources;
  std::vector<CrossCell> cells;  // row-major: train source, then test source
  std::map<std::string, TrainedScenario> models;  // one per train source

  const CrossCell& cell(const std::string& train, const std::string& test) const;
};

// Trains one model per source and evaluates it against every source's
// store. Recomputes each source's split and history selections from its own
// metadata and aborts with ReproducibilityError on any divergence.
CrossMatrix run_cross_matrix(const Workspace& ws, const std::vector<std::string>& sources,
                             const ModelConfig& base_config);

nlohmann::json to_json(const CrossMatrix& m);

// Digest of the raw parameter values.
std::string parameter_digest(const ModelParameters& p);

struct Comparison {
  std::string baseline;
  std::string treatment;
};

enum class TableFormat { kText, kCsv };

// Rows are reports in the given order, columns the listed metrics present in
// the first report. Stars come from paired t-tests on the per-instance
// vectors for each declared comparison; percent-change lines follow the
// table. Throws ValidationError when split hashes differ.
std::string render_results_table(const std::vector<nlohmann::json>& reports,
                                 const std::vector<Comparison>& comparisons,
                                 const std::vector<std::string>& columns = {},
                                 TableFormat format = TableFormat::kText);

MetricDirection metric_direction(const std::string& metric);

// Paired test between two reports on one metric's per-instance vectors.
SignificanceResult compare_reports(const nlohmann::json& baseline, const nlohmann::json& treatment,
                                   const std::string& metric);

struct SweepGrid {
  std::vector<std::size_t> latent_dims = {20, 50, 100};
  std::vector<double> learning_rates = {0.0001, 0.0005, 0.001, 0.005};
  std::vector<std::size_t> batch_sizes = {128, 256, 512, 1024};
  std::vector<double> reductions = {0.75, 0.5, 0.3, 0.25};
};

struct SweepPoint {
  ModelConfig config;
  double final_train_loss = 0.0;
  double final_validation_loss = 0.0;
};

// Full grid over one scenario; points in grid order (latent, lr, batch, rho).
// The last learning layer follows the latent size.
std::vector<SweepPoint> run_sweep(const Workspace& ws, const ScenarioSpec& spec,
                                  const SweepGrid& grid);

nlohmann::json to_json(const std::vector<SweepPoint>& points);

}  // namespace revlab

#endif  // REVLAB_EXPERIMENT_HPP_
