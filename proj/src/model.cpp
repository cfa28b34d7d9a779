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

#include "revlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>

#include "revlab/error.hpp"
#include "revlab/simd/kernels.hpp"

namespace revlab {
namespace {

void dense_forward(const std::vector<double>& values, const DenseLayout& l,
                   std::span<const double> in, DenseActivation& act, bool relu) {
  const auto& k = simd::active_kernels();
  act.pre.resize(l.out);
  for (std::size_t r = 0; r < l.out; ++r) {
    act.pre[r] = k.dot(values.data() + l.weights + r * l.in, in.data(), l.in) +
                 values[l.bias + r];
  }
  if (relu) {
    act.post.resize(l.out);
    for (std::size_t r = 0; r < l.out; ++r) act.post[r] = act.pre[r] > 0.0 ? act.pre[r] : 0.0;
  } else {
    act.post.clear();
  }
}

// delta holds dL/d(post) on entry for a relu layer. Adds parameter gradients
// and, when delta_in is non-null, writes dL/d(input) into it.
void dense_backward_relu(const std::vector<double>& values, const DenseLayout& l,
                         std::span<const double> in, const DenseActivation& act,
                         std::span<const double> delta_post, Gradients& grads,
                         std::vector<double>* delta_in) {
  const auto& k = simd::active_kernels();
  if (delta_in != nullptr) delta_in->assign(l.in, 0.0);
  for (std::size_t r = 0; r < l.out; ++r) {
    if (act.pre[r] <= 0.0) continue;
    const double d = delta_post[r];
    if (d == 0.0) continue;
    k.axpy(d, in.data(), grads.data() + l.weights + r * l.in, l.in);
    grads[l.bias + r] += d;
    if (delta_in != nullptr) {
      k.axpy(d, values.data() + l.weights + r * l.in, delta_in->data(), l.in);
    }
  }
}

DenseLayout place(std::size_t in, std::size_t out, std::size_t& cursor) {
  DenseLayout l{in, out, cursor, cursor + in * out};
  cursor += in * out + out;
  return l;
}

std::string describe_dense(const char* stack, const std::vector<DenseLayout>& layers,
                           std::size_t offset) {
  for (std::size_t li = 0; li < layers.size(); ++li) {
    const auto& l = layers[li];
    if (offset >= l.weights && offset < l.bias) {
      return std::string(stack) + "[" + std::to_string(li) + "].weights[" +
             std::to_string((offset - l.weights) / l.in) + "," +
             std::to_string((offset - l.weights) % l.in) + "]";
    }
    if (offset >= l.bias && offset < l.bias + l.out) {
      return std::string(stack) + "[" + std::to_string(li) + "].bias[" +
             std::to_string(offset - l.bias) + "]";
    }
  }
  return {};
}

void fill_history(std::span<const ReviewId> ids, const EmbeddingStore& store, std::size_t k,
                  std::vector<double>& out) {
  const std::size_t d = store.dim();
  out.assign(k * d, 0.0);
  const std::size_t n = std::min(ids.size(), k);
  for (std::size_t j = 0; j < n; ++j) {
    auto v = store.at(ids[j]);
    std::copy(v.begin(), v.end(), out.begin() + static_cast<std::ptrdiff_t>(j * d));
  }
}

struct Scratch {
  std::vector<double> user_input;
  std::vector<double> item_input;
  ForwardCache cache;
};

double run_forward(const ModelParameters& params, const ModelConfig& cfg,
                   const Instance& inst, const EmbeddingStore* store, Scratch& s) {
  if (cfg.variant == ModelVariant::kWithReviews) {
    if (store == nullptr) throw ValidationError("review model needs an embedding store");
    if (store->dim() != cfg.embedding_dim) {
      throw ValidationError("embedding store dim " + std::to_string(store->dim()) +
                            " does not match model dim " + std::to_string(cfg.embedding_dim));
    }
    fill_history(inst.user_history, *store, cfg.history_length, s.user_input);
    fill_history(inst.item_history, *store, cfg.history_length, s.item_input);
  }
  forward_into(params, cfg, inst.user_index, inst.item_index, s.user_input, s.item_input,
               s.cache);
  return s.cache.prediction;
}

void put_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), 8);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char buf[8];
  if (!in.read(reinterpret_cast<char*>(buf), 8)) throw ValidationError("truncated checkpoint");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

constexpr char kCheckpointMagic[8] = {'R', 'E', 'V', 'C', 'K', 'P', 'T', '1'};

}  // namespace

std::string to_string(ModelVariant v) {
  return v == ModelVariant::kIdsOnly ? "ids_only" : "with_reviews";
}

ModelVariant variant_from_string(const std::string& s) {
  if (s == "ids_only") return ModelVariant::kIdsOnly;
  if (s == "with_reviews") return ModelVariant::kWithReviews;
  throw ValidationError("unknown model variant '" + s + "'");
}

void ModelConfig::validate() const {
  auto fail = [](const std::string& m) { throw ValidationError("model config: " + m); };
  if (latent_dim < 1) fail("latent_dim must be >= 1");
  if (history_length < 1) fail("history_length (k) must be >= 1");
  if (embedding_dim < 1) fail("embedding_dim (d) must be >= 1");
  if (variant == ModelVariant::kWithReviews) {
    if (learn_layer_sizes.empty()) fail("learn_layer_sizes must be nonempty");
    if (learn_layer_sizes.back() != latent_dim) {
      fail("last learn layer size must equal latent_dim");
    }
    for (auto s : learn_layer_sizes) {
      if (s < 1) fail("learn layer sizes must be positive");
    }
  }
  if (pred_depth < 1) fail("pred_depth must be >= 1");
  if (!(reduction > 0.0 && reduction <= 1.0)) fail("reduction must lie in (0, 1]");
  if (min_pred_width < 1) fail("min_pred_width must be >= 1");
  if (!(learning_rate > 0.0)) fail("learning_rate must be positive");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (epochs < 1) fail("epochs must be >= 1");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0)) fail("adam beta1 must lie in [0, 1)");
  if (!(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) fail("adam beta2 must lie in [0, 1)");
  if (!(adam_epsilon > 0.0)) fail("adam epsilon must be positive");
  if (!(init_stddev >= 0.0)) fail("init_stddev must be non-negative");
}

std::size_t ModelConfig::fused_width() const {
  return variant == ModelVariant::kIdsOnly ? 2 * latent_dim : 4 * latent_dim;
}

std::vector<std::size_t> ModelConfig::prediction_widths() const {
  std::vector<std::size_t> widths;
  double prev = static_cast<double>(fused_width());
  for (std::size_t l = 0; l < pred_depth; ++l) {
    auto w = static_cast<std::size_t>(std::llround(prev * reduction));
    w = std::max(w, min_pred_width);
    widths.push_back(w);
    prev = static_cast<double>(w);
  }
  return widths;
}

nlohmann::json to_json(const ModelConfig& c) {
  return {
      {"variant", to_string(c.variant)},
      {"latent_dim", c.latent_dim},
      {"history_length", c.history_length},
      {"embedding_dim", c.embedding_dim},
      {"learn_layer_sizes", c.learn_layer_sizes},
      {"pred_depth", c.pred_depth},
      {"reduction", c.reduction},
      {"min_pred_width", c.min_pred_width},
      {"learning_rate", c.learning_rate},
      {"batch_size", c.batch_size},
      {"epochs", c.epochs},
      {"seed", c.seed},
      {"adam_beta1", c.adam_beta1},
      {"adam_beta2", c.adam_beta2},
      {"adam_epsilon", c.adam_epsilon},
      {"init_stddev", c.init_stddev},
  };
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  try {
    c.variant = variant_from_string(j.at("variant").get<std::string>());
    c.latent_dim = j.at("latent_dim").get<std::size_t>();
    c.history_length = j.at("history_length").get<std::size_t>();
    c.embedding_dim = j.at("embedding_dim").get<std::size_t>();
    c.learn_layer_sizes = j.at("learn_layer_sizes").get<std::vector<std::size_t>>();
    c.pred_depth = j.at("pred_depth").get<std::size_t>();
    c.reduction = j.at("reduction").get<double>();
    c.min_pred_width = j.at("min_pred_width").get<std::size_t>();
    c.learning_rate = j.at("learning_rate").get<double>();
    c.batch_size = j.at("batch_size").get<std::size_t>();
    c.epochs = j.at("epochs").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.adam_beta1 = j.at("adam_beta1").get<double>();
    c.adam_beta2 = j.at("adam_beta2").get<double>();
    c.adam_epsilon = j.at("adam_epsilon").get<double>();
    c.init_stddev = j.at("init_stddev").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("model config JSON: ") + e.what());
  }
  c.validate();
  return c;
}

ParameterLayout ParameterLayout::build(const ModelConfig& cfg, std::size_t num_users,
                                       std::size_t num_items) {
  cfg.validate();
  ParameterLayout l;
  const std::size_t p = cfg.latent_dim;
  l.user_rows = num_users + 1;
  l.item_rows = num_items + 1;
  std::size_t cursor = 0;
  l.user_table = cursor;
  cursor += l.user_rows * p;
  l.item_table = cursor;
  cursor += l.item_rows * p;
  if (cfg.variant == ModelVariant::kWithReviews) {
    for (auto* stack : {&l.user_learn, &l.item_learn}) {
      std::size_t in = cfg.history_length * cfg.embedding_dim;
      for (std::size_t out : cfg.learn_layer_sizes) {
        stack->push_back(place(in, out, cursor));
        in = out;
      }
    }
  }
  std::size_t in = cfg.fused_width();
  for (std::size_t w : cfg.prediction_widths()) {
    l.pred.push_back(place(in, w, cursor));
    in = w;
  }
  l.pred.push_back(place(in, 1, cursor));
  l.total = cursor;
  return l;
}

std::string ParameterLayout::describe(std::size_t offset) const {
  if (offset < item_table) {
    const std::size_t p = (item_table - user_table) / user_rows;
    return "user_table[" + std::to_string(offset / p) + "," + std::to_string(offset % p) + "]";
  }
  const std::size_t p = (item_table - user_table) / user_rows;
  if (offset < item_table + item_rows * p) {
    const std::size_t rel = offset - item_table;
    return "item_table[" + std::to_string(rel / p) + "," + std::to_string(rel % p) + "]";
  }
  for (auto [name, stack] : {std::pair{"user_learn", &user_learn},
                             std::pair{"item_learn", &item_learn}, std::pair{"pred", &pred}}) {
    auto s = describe_dense(name, *stack, offset);
    if (!s.empty()) return s;
  }
  return "offset " + std::to_string(offset);
}

ModelParameters init_params(const ModelConfig& cfg, std::size_t num_users,
                            std::size_t num_items, Rng& rng) {
  ModelParameters mp;
  mp.layout = ParameterLayout::build(cfg, num_users, num_items);
  mp.values.assign(mp.layout.total, 0.0);
  const std::size_t p = cfg.latent_dim;
  const std::size_t reserved_user_begin = mp.layout.user_table + mp.layout.reserved_user() * p;
  const std::size_t reserved_item_begin = mp.layout.item_table + mp.layout.reserved_item() * p;
  for (std::size_t i = 0; i < mp.layout.total; ++i) {
    const bool reserved = (i >= reserved_user_begin && i < reserved_user_begin + p) ||
                          (i >= reserved_item_begin && i < reserved_item_begin + p);
    if (!reserved) mp.values[i] = rng.normal(0.0, cfg.init_stddev);
  }
  return mp;
}

void forward_into(const ModelParameters& params, const ModelConfig& cfg,
                  std::size_t user_index, std::size_t item_index,
                  std::span<const double> user_input, std::span<const double> item_input,
                  ForwardCache& cache) {
  const auto& l = params.layout;
  const auto& v = params.values;
  const std::size_t p = cfg.latent_dim;
  if (user_index >= l.user_rows || item_index >= l.item_rows) {
    throw ValidationError("user/item index out of range");
  }
  cache.user_index = user_index;
  cache.item_index = item_index;
  cache.fused.resize(cfg.fused_width());
  std::copy_n(v.begin() + static_cast<std::ptrdiff_t>(l.user_table + user_index * p), p,
              cache.fused.begin());
  std::copy_n(v.begin() + static_cast<std::ptrdiff_t>(l.item_table + item_index * p), p,
              cache.fused.begin() + static_cast<std::ptrdiff_t>(p));

  if (cfg.variant == ModelVariant::kWithReviews) {
    const std::size_t width = cfg.history_length * cfg.embedding_dim;
    if (user_input.size() != width || item_input.size() != width) {
      throw ValidationError("history input has length " + std::to_string(user_input.size()) +
                            "/" + std::to_string(item_input.size()) + ", expected k*d = " +
                            std::to_string(width));
    }
    cache.user_input.assign(user_input.begin(), user_input.end());
    cache.item_input.assign(item_input.begin(), item_input.end());
    auto run_stack = [&](const std::vector<DenseLayout>& stack,
                         const std::vector<double>& input, std::vector<DenseActivation>& acts,
                         std::size_t fused_offset) {
      acts.resize(stack.size());
      std::span<const double> in = input;
      for (std::size_t i = 0; i < stack.size(); ++i) {
        dense_forward(v, stack[i], in, acts[i], true);
        in = acts[i].post;
      }
      std::copy(in.begin(), in.end(), cache.fused.begin() + static_cast<std::ptrdiff_t>(fused_offset));
    };
    run_stack(l.user_learn, cache.user_input, cache.user_learn, 2 * p);
    run_stack(l.item_learn, cache.item_input, cache.item_learn, 3 * p);
  } else {
    cache.user_input.clear();
    cache.item_input.clear();
    cache.user_learn.clear();
    cache.item_learn.clear();
  }

  cache.pred.resize(l.pred.size());
  std::span<const double> in = cache.fused;
  for (std::size_t i = 0; i + 1 < l.pred.size(); ++i) {
    dense_forward(v, l.pred[i], in, cache.pred[i], true);
    in = cache.pred[i].post;
  }
  dense_forward(v, l.pred.back(), in, cache.pred.back(), false);
  cache.prediction = cache.pred.back().pre[0];
}

ForwardCache forward(const ModelParameters& params, const ModelConfig& cfg,
                     std::size_t user_index, std::size_t item_index,
                     const HistoryWindow& user_history, const HistoryWindow& item_history) {
  ForwardCache cache;
  if (cfg.variant == ModelVariant::kWithReviews) {
    for (const HistoryWindow* h : {&user_history, &item_history}) {
      if (h->k != cfg.history_length || h->dim != cfg.embedding_dim) {
        throw ValidationError("history window shape (k=" + std::to_string(h->k) +
                              ", d=" + std::to_string(h->dim) + ") does not match config");
      }
    }
  }
  forward_into(params, cfg, user_index, item_index, user_history.values, item_history.values,
               cache);
  return cache;
}

void backward(const ForwardCache& cache, double target, const ModelParameters& params,
              const ModelConfig& cfg, Gradients& grads, double scale) {
  const auto& l = params.layout;
  const auto& v = params.values;
  const std::size_t p = cfg.latent_dim;
  if (grads.size() != l.total) grads.assign(l.total, 0.0);

  const double d_out = 2.0 * (cache.prediction - target) * scale;
  if (d_out == 0.0) return;

  // Output layer (affine).
  const DenseLayout& out = l.pred.back();
  std::span<const double> top =
      l.pred.size() > 1 ? std::span<const double>(cache.pred[l.pred.size() - 2].post)
                        : std::span<const double>(cache.fused);
  const auto& k = simd::active_kernels();
  k.axpy(d_out, top.data(), grads.data() + out.weights, out.in);
  grads[out.bias] += d_out;
  std::vector<double> delta(out.in);
  for (std::size_t c = 0; c < out.in; ++c) delta[c] = d_out * v[out.weights + c];

  // Hidden prediction layers, top down.
  std::vector<double> delta_in;
  for (std::size_t i = l.pred.size() - 1; i-- > 0;) {
    std::span<const double> in =
        i > 0 ? std::span<const double>(cache.pred[i - 1].post) : std::span<const double>(cache.fused);
    dense_backward_relu(v, l.pred[i], in, cache.pred[i], delta, grads, &delta_in);
    delta.swap(delta_in);
  }
  // delta now holds dL/dx_ui.
  k.axpy(1.0, delta.data(), grads.data() + l.user_table + cache.user_index * p, p);
  k.axpy(1.0, delta.data() + p, grads.data() + l.item_table + cache.item_index * p, p);

  if (cfg.variant == ModelVariant::kWithReviews) {
    auto back_stack = [&](const std::vector<DenseLayout>& stack,
                          const std::vector<DenseActivation>& acts,
                          const std::vector<double>& input, std::size_t fused_offset) {
      std::vector<double> d(delta.begin() + static_cast<std::ptrdiff_t>(fused_offset),
                            delta.begin() + static_cast<std::ptrdiff_t>(fused_offset + p));
      std::vector<double> d_in;
      for (std::size_t i = stack.size(); i-- > 0;) {
        std::span<const double> in =
            i > 0 ? std::span<const double>(acts[i - 1].post) : std::span<const double>(input);
        dense_backward_relu(v, stack[i], in, acts[i], d, grads, i > 0 ? &d_in : nullptr);
        if (i > 0) d.swap(d_in);
      }
    };
    back_stack(l.user_learn, cache.user_learn, cache.user_input, 2 * p);
    back_stack(l.item_learn, cache.item_learn, cache.item_input, 3 * p);
  }
}

double mse_loss(std::span<const double> predictions, std::span<const double> targets) {
  if (predictions.empty()) throw ValidationError("mse_loss: empty batch");
  if (predictions.size() != targets.size()) {
    throw ValidationError("mse_loss: predictions and targets differ in length");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double r = predictions[i] - targets[i];
    sum += r * r;
  }
  return sum / static_cast<double>(predictions.size());
}

void adam_step(ModelParameters& params, std::span<const double> grads, AdamState& state,
               double learning_rate, double beta1, double beta2, double epsilon) {
  const std::size_t n = params.values.size();
  if (grads.size() != n || state.m.size() != n || state.v.size() != n) {
    throw ValidationError("adam_step: state/gradient shapes do not match parameters");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(grads[i])) {
      throw NumericError("non-finite gradient " + std::to_string(grads[i]) + " at " +
                         params.layout.describe(i) + " (step " +
                         std::to_string(state.step + 1) + ")");
    }
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  simd::AdamCoefficients c{beta1,   beta2, learning_rate, epsilon, 1.0 - std::pow(beta1, t),
                           1.0 - std::pow(beta2, t)};
  simd::active_kernels().adam_update(params.values.data(), state.m.data(), state.v.data(),
                                     grads.data(), n, c);
}

double predict_raw(const ModelParameters& params, const ModelConfig& cfg,
                   const Instance& instance, const EmbeddingStore* store) {
  Scratch s;
  return run_forward(params, cfg, instance, store, s);
}

TrainResult train(const ModelConfig& cfg, std::size_t num_users, std::size_t num_items,
                  std::span<const Instance> train_set, std::span<const Instance> validation_set,
                  const EmbeddingStore* store) {
  cfg.validate();
  if (train_set.empty()) throw ValidationError("train: empty training set");
  Rng init_rng(derive_seed(cfg.seed, "init"));
  TrainResult result;
  result.params = init_params(cfg, num_users, num_items, init_rng);
  ModelParameters& params = result.params;
  AdamState adam = AdamState::zeros(params.layout.total);
  Gradients grads(params.layout.total, 0.0);
  Scratch s;

  auto mean_loss = [&](std::span<const Instance> set) {
    if (set.empty()) return std::numeric_limits<double>::quiet_NaN();
    double sum = 0.0;
    for (const auto& inst : set) {
      const double r = run_forward(params, cfg, inst, store, s) - inst.rating;
      sum += r * r;
    }
    return sum / static_cast<double>(set.size());
  };
  result.initial_train_loss = mean_loss(train_set);

  std::vector<std::size_t> order(train_set.size());
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle(derive_seed(cfg.seed, "shuffle:" + std::to_string(epoch)));
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[shuffle.uniform_below(i)]);
    }
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const double scale = 1.0 / static_cast<double>(end - start);
      std::fill(grads.begin(), grads.end(), 0.0);
      for (std::size_t b = start; b < end; ++b) {
        const Instance& inst = train_set[order[b]];
        const double pred = run_forward(params, cfg, inst, store, s);
        epoch_loss += (pred - inst.rating) * (pred - inst.rating);
        backward(s.cache, inst.rating, params, cfg, grads, scale);
      }
      adam_step(params, grads, adam, cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2,
                cfg.adam_epsilon);
      ++result.optimizer_steps;
    }
    result.history.push_back(
        {epoch, epoch_loss / static_cast<double>(order.size()), mean_loss(validation_set)});
  }
  return result;
}

IdVocabulary::IdVocabulary(std::vector<std::string> sorted_unique_ids)
    : ids_(std::move(sorted_unique_ids)) {
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!index_.emplace(ids_[i], i).second) {
      throw ValidationError("duplicate id in vocabulary: " + ids_[i]);
    }
  }
}

std::size_t IdVocabulary::index_of(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? ids_.size() : it->second;
}

double predict_clamped(const TrainedModel& model, const Instance& instance,
                       const EmbeddingStore* store) {
  return clamp_rating(predict_raw(model.params, model.config, instance, store));
}

void save_checkpoint(const std::filesystem::path& path, const TrainedModel& model) {
  nlohmann::json header;
  header["format"] = "revlab-checkpoint";
  header["version"] = 1;
  header["config"] = to_json(model.config);
  header["users"] = model.users.ids();
  header["items"] = model.items.ids();
  header["parameter_count"] = model.params.values.size();
  const std::string text = header.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write checkpoint " + path.string());
  out.write(kCheckpointMagic, 8);
  put_u64(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (double x : model.params.values) put_f64(out, x);
  if (!out) throw ValidationError("checkpoint write failed: " + path.string());
}

TrainedModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open checkpoint " + path.string());
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kCheckpointMagic, 8) != 0) {
    throw ValidationError(path.string() + ": not a revlab checkpoint");
  }
  const std::uint64_t len = get_u64(in);
  std::string text(len, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(len))) {
    throw ValidationError(path.string() + ": truncated checkpoint header");
  }
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": bad checkpoint header: " + e.what());
  }
  TrainedModel m;
  m.config = model_config_from_json(header.at("config"));
  m.users = IdVocabulary(header.at("users").get<std::vector<std::string>>());
  m.items = IdVocabulary(header.at("items").get<std::vector<std::string>>());
  m.params.layout = ParameterLayout::build(m.config, m.users.size(), m.items.size());
  if (header.at("parameter_count").get<std::size_t>() != m.params.layout.total) {
    throw ValidationError(path.string() + ": parameter count does not match layout");
  }
  m.params.values.resize(m.params.layout.total);
  for (auto& x : m.params.values) {
    const std::uint64_t bits = get_u64(in);
    std::memcpy(&x, &bits, 8);
  }
  return m;
}

}  // namespace revlab
