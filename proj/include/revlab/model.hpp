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

// Neural collaborative filtering extended with review histories.
//
//   e_u, e_i        rows of the user / item identifier tables (width p)
//   h~_u = relu-MLP(concat of the user's k most recent review vectors)
//   z~_i = relu-MLP(concat of the item's k most recent review vectors)
//   x    = [e_u | e_i | h~_u | z~_i]                            (width 4p)
//   h^l  = relu(W^l h^(l-1) + b^l), l = 1..t, h^0 = x
//   r^   = w^(t+1) . h^t + b^(t+1)                                (affine)
//
// The ids-only variant drops both learning stacks: x = [e_u | e_i].
//
// All parameters live in one flat vector of doubles so the optimizer and the
// gradient buffers run over contiguous memory. Gradients are derived by hand
// for this fixed architecture.

#ifndef REVLAB_MODEL_HPP_
#define REVLAB_MODEL_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "revlab/embeddings.hpp"
#include "revlab/rng.hpp"

namespace revlab {

enum class ModelVariant { kWithReviews, kIdsOnly };

std::string to_string(ModelVariant v);
ModelVariant variant_from_string(const std::string& s);

struct ModelConfig {
  ModelVariant variant = ModelVariant::kWithReviews;
  std::size_t latent_dim = 100;  // p = q
  std::size_t history_length = 3;  // k
  std::size_t embedding_dim = 384;  // d
  std::vector<std::size_t> learn_layer_sizes = {256, 100};
  std::size_t pred_depth = 2;  // t
  double reduction = 0.25;  // rho
  std::size_t min_pred_width = 4;
  double learning_rate = 0.0005;
  std::size_t batch_size = 256;
  std::size_t epochs = 50;
  std::uint64_t seed = 0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double init_stddev = 0.01;

  // Throws ValidationError on any broken invariant.
  void validate() const;

  std::size_t fused_width() const;
  // Hidden widths of the prediction network: round(prev * rho), floored.
  std::vector<std::size_t> prediction_widths() const;
};

nlohmann::json to_json(const ModelConfig& c);
ModelConfig model_config_from_json(const nlohmann::json& j);

struct DenseLayout {
  std::size_t in = 0;
  std::size_t out = 0;
  std::size_t weights = 0;  // offset of the out x in row-major block
  std::size_t bias = 0;     // offset of the out-long bias
};

struct ParameterLayout {
  std::size_t user_rows = 0;  // known users + 1 reserved cold-start row
  std::size_t item_rows = 0;
  std::size_t user_table = 0;
  std::size_t item_table = 0;
  std::vector<DenseLayout> user_learn;
  std::vector<DenseLayout> item_learn;
  std::vector<DenseLayout> pred;  // t hidden layers then the scalar output
  std::size_t total = 0;

  static ParameterLayout build(const ModelConfig& cfg, std::size_t num_users,
                               std::size_t num_items);
  std::size_t reserved_user() const { return user_rows - 1; }
  std::size_t reserved_item() const { return item_rows - 1; }

  // Names the block containing a flat offset, for diagnostics.
  std::string describe(std::size_t offset) const;
};

struct ModelParameters {
  ParameterLayout layout;
  std::vector<double> values;
};

using Gradients = std::vector<double>;

// Every weight and bias drawn i.i.d. Normal(0, init_stddev^2) from `rng`;
// the reserved cold-start rows stay zero.
ModelParameters init_params(const ModelConfig& cfg, std::size_t num_users,
                            std::size_t num_items, Rng& rng);

struct DenseActivation {
  std::vector<double> pre;   // W x + b
  std::vector<double> post;  // relu(pre), empty for the affine output
};

struct ForwardCache {
  std::size_t user_index = 0;
  std::size_t item_index = 0;
  std::vector<double> user_input;  // h-bar_u, k*d
  std::vector<double> item_input;  // z-bar_i, k*d
  std::vector<DenseActivation> user_learn;
  std::vector<DenseActivation> item_learn;
  std::vector<double> fused;  // x_ui
  std::vector<DenseActivation> pred;
  double prediction = 0.0;
};

// Full forward pass. Histories must have length k and dimension d (ignored by
// the ids-only variant). Indices may be the reserved cold-start rows.
ForwardCache forward(const ModelParameters& params, const ModelConfig& cfg,
                     std::size_t user_index, std::size_t item_index,
                     const HistoryWindow& user_history, const HistoryWindow& item_history);

// Same, reusing `cache` storage; inputs are the flattened k*d histories.
void forward_into(const ModelParameters& params, const ModelConfig& cfg,
                  std::size_t user_index, std::size_t item_index,
                  std::span<const double> user_input, std::span<const double> item_input,
                  ForwardCache& cache);

// Accumulates scale * d/dtheta (prediction - target)^2 into `grads`
// (length layout.total). ReLU subgradient at 0 is 0.
void backward(const ForwardCache& cache, double target, const ModelParameters& params,
              const ModelConfig& cfg, Gradients& grads, double scale = 1.0);

double mse_loss(std::span<const double> predictions, std::span<const double> targets);

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;

  static AdamState zeros(std::size_t n) { return {std::vector<double>(n), std::vector<double>(n), 0}; }
};

// Standard bias-corrected Adam. Throws NumericError naming the first
// non-finite gradient entry.
void adam_step(ModelParameters& params, std::span<const double> grads, AdamState& state,
               double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
               double epsilon = 1e-8);

// A rating event with its history selections (ids most recent first). Vectors
// are looked up from whichever store is supplied at train/predict time.
struct Instance {
  std::size_t user_index = 0;
  std::size_t item_index = 0;
  double rating = 0.0;
  std::vector<ReviewId> user_history;
  std::vector<ReviewId> item_history;
};

struct EpochLoss {
  std::size_t epoch = 0;
  double train_loss = 0.0;       // mean squared error over the epoch's batches
  double validation_loss = 0.0;  // NaN without validation instances
};

struct TrainResult {
  ModelParameters params;
  double initial_train_loss = 0.0;
  std::vector<EpochLoss> history;
  std::uint64_t optimizer_steps = 0;
};

// Fixed-schedule mini-batch Adam on MSE, reshuffling every epoch from a
// seed-derived stream. Returns the final-epoch model. `store` may be null for
// the ids-only variant.
TrainResult train(const ModelConfig& cfg, std::size_t num_users, std::size_t num_items,
                  std::span<const Instance> train_set, std::span<const Instance> validation_set,
                  const EmbeddingStore* store);

// Raw (unclamped) prediction for one instance.
double predict_raw(const ModelParameters& params, const ModelConfig& cfg,
                   const Instance& instance, const EmbeddingStore* store);

inline double clamp_rating(double raw) { return raw < 1.0 ? 1.0 : (raw > 5.0 ? 5.0 : raw); }

// Maps external ids to table rows; unknown ids map to the reserved row.
class IdVocabulary {
 public:
  IdVocabulary() = default;
  explicit IdVocabulary(std::vector<std::string> sorted_unique_ids);

  std::size_t size() const { return ids_.size(); }
  std::size_t index_of(const std::string& id) const;  // size() when unknown
  const std::vector<std::string>& ids() const { return ids_; }

 private:
  std::vector<std::string> ids_;
  std::map<std::string, std::size_t> index_;
};

struct TrainedModel {
  ModelConfig config;
  IdVocabulary users;
  IdVocabulary items;
  ModelParameters params;
};

// Forward output clamped to [1, 5].
double predict_clamped(const TrainedModel& model, const Instance& instance,
                       const EmbeddingStore* store);

// Binary container: "REVCKPT1", u64 header length, JSON header (config and
// vocabularies), then layout.total little-endian f64 values. Bitwise stable.
void save_checkpoint(const std::filesystem::path& path, const TrainedModel& model);
TrainedModel load_checkpoint(const std::filesystem::path& path);

}  // namespace revlab

#endif  // REVLAB_MODEL_HPP_
