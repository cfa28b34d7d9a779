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

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numeric>

#include "fixtures.hpp"
#include "gradcheck.hpp"
#include "revlab/digest.hpp"
#include "revlab/error.hpp"
#include "revlab/experiment.hpp"
#include "revlab/model.hpp"
#include "revlab/synthetic.hpp"

namespace revlab {
namespace {

ModelConfig tiny(ModelVariant v = ModelVariant::kWithReviews) {
  ModelConfig c;
  c.variant = v;
  c.latent_dim = 4;
  c.history_length = 2;
  c.embedding_dim = 8;
  c.learn_layer_sizes = {6, 4};
  c.batch_size = 16;
  c.epochs = 3;
  return c;
}

TEST(ModelConfig, FullSizeShapes) {
  ModelConfig c;
  c.latent_dim = 100;
  c.history_length = 3;
  c.embedding_dim = 384;
  c.learn_layer_sizes = {256, 100};
  c.reduction = 0.25;
  c.pred_depth = 2;
  EXPECT_EQ(c.fused_width(), 400u);
  EXPECT_EQ(c.prediction_widths(), (std::vector<std::size_t>{100, 25}));
  c.variant = ModelVariant::kIdsOnly;
  EXPECT_EQ(c.fused_width(), 200u);
}

TEST(ModelConfig, WidthsAreFloored) {
  ModelConfig c = tiny();
  c.pred_depth = 3;
  c.reduction = 0.25;
  EXPECT_EQ(c.prediction_widths(), (std::vector<std::size_t>{4, 4, 4}));
}

TEST(ModelConfig, InvalidConfigsAreRejected) {
  auto broken = [](auto mutate) {
    ModelConfig c = tiny();
    mutate(c);
    return c;
  };
  EXPECT_THROW(broken([](ModelConfig& c) { c.learn_layer_sizes = {6, 5}; }).validate(), ValidationError);
  EXPECT_THROW(broken([](ModelConfig& c) { c.reduction = 0.0; }).validate(), ValidationError);
  EXPECT_THROW(broken([](ModelConfig& c) { c.reduction = 1.5; }).validate(), ValidationError);
  EXPECT_THROW(broken([](ModelConfig& c) { c.epochs = 0; }).validate(), ValidationError);
  EXPECT_THROW(broken([](ModelConfig& c) { c.latent_dim = 0; }).validate(), ValidationError);
  EXPECT_NO_THROW(tiny().validate());
}

TEST(ModelConfig, JsonRoundTrip) {
  ModelConfig c = tiny();
  c.seed = 1234567890123ULL;
  c.learning_rate = 0.005;
  EXPECT_EQ(to_json(model_config_from_json(to_json(c))), to_json(c));
}

TEST(InitParams, DeterministicPerSeed) {
  const ModelConfig c = tiny();
  Rng a(5), b(5), d(6);
  EXPECT_EQ(init_params(c, 10, 10, a).values, init_params(c, 10, 10, b).values);
  EXPECT_NE(init_params(c, 10, 10, d).values, init_params(c, 10, 10, a).values);
}

TEST(InitParams, MomentsMatchNormal001) {
  ModelConfig c = tiny();
  Rng rng(1);
  const auto p = init_params(c, 2000, 1000, rng);
  ASSERT_GE(p.values.size(), 10000u);
  // Reserved cold-start rows are zero by design; leave them out.
  std::vector<double> drawn;
  const std::size_t pdim = c.latent_dim;
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    const bool reserved_user = i >= p.layout.user_table + p.layout.reserved_user() * pdim &&
                               i < p.layout.user_table + p.layout.user_rows * pdim;
    const bool reserved_item = i >= p.layout.item_table + p.layout.reserved_item() * pdim &&
                               i < p.layout.item_table + p.layout.item_rows * pdim;
    if (reserved_user || reserved_item) {
      EXPECT_EQ(p.values[i], 0.0);
    } else {
      drawn.push_back(p.values[i]);
    }
  }
  const double mean = std::accumulate(drawn.begin(), drawn.end(), 0.0) / drawn.size();
  double ss = 0;
  for (double x : drawn) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (drawn.size() - 1));
  EXPECT_NEAR(mean, 0.0, 0.001);
  EXPECT_GE(sd, 0.009);
  EXPECT_LE(sd, 0.011);
}

TEST(Forward, ZeroNetworkPredictsZero) {
  const ModelConfig c = tiny();
  Rng rng(1);
  auto p = init_params(c, 3, 3, rng);
  std::fill(p.values.begin(), p.values.end(), 0.0);
  std::vector<double> h(16, 3.0);
  ForwardCache cache;
  forward_into(p, c, 0, 1, h, h, cache);
  EXPECT_EQ(cache.prediction, 0.0);
  // Only the output bias moves the prediction then.
  p.values[p.layout.pred.back().bias] = 2.5;
  forward_into(p, c, 2, 0, h, h, cache);
  EXPECT_EQ(cache.prediction, 2.5);
}

TEST(Forward, IdsOnlyFusesIdentifierEmbeddings) {
  const ModelConfig c = tiny(ModelVariant::kIdsOnly);
  Rng rng(2);
  const auto p = init_params(c, 3, 3, rng);
  ForwardCache cache;
  forward_into(p, c, 1, 2, {}, {}, cache);
  ASSERT_EQ(cache.fused.size(), 8u);
  for (std::size_t j = 0; j < 4; ++j) {
    EXPECT_EQ(cache.fused[j], p.values[p.layout.user_table + 1 * 4 + j]);
    EXPECT_EQ(cache.fused[4 + j], p.values[p.layout.item_table + 2 * 4 + j]);
  }
}

TEST(Forward, EmptyHistoryFeatureDependsOnlyOnBiases) {
  const ModelConfig c = tiny();
  Rng rng(3);
  const auto p = init_params(c, 3, 3, rng);
  std::vector<double> zeros(16, 0.0);
  ForwardCache a, b;
  forward_into(p, c, 0, 0, zeros, zeros, a);
  forward_into(p, c, 0, 0, zeros, zeros, b);
  EXPECT_EQ(a.prediction, b.prediction);
  // relu(b1) -> relu(W2 relu(b1) + b2), computed by hand.
  const auto& l1 = p.layout.user_learn[0];
  const auto& l2 = p.layout.user_learn[1];
  std::vector<double> h1(l1.out);
  for (std::size_t o = 0; o < l1.out; ++o) h1[o] = std::max(0.0, p.values[l1.bias + o]);
  for (std::size_t o = 0; o < l2.out; ++o) {
    double s = p.values[l2.bias + o];
    for (std::size_t in = 0; in < l2.in; ++in) s += p.values[l2.weights + o * l2.in + in] * h1[in];
    EXPECT_DOUBLE_EQ(a.fused[8 + o], std::max(0.0, s));
  }
}

TEST(Forward, RejectsWrongHistoryWidth) {
  const ModelConfig c = tiny();
  Rng rng(1);
  const auto p = init_params(c, 3, 3, rng);
  std::vector<double> shortv(15), ok(16);
  ForwardCache cache;
  EXPECT_THROW(forward_into(p, c, 0, 0, shortv, ok, cache), ValidationError);
  EXPECT_THROW(forward_into(p, c, 9, 0, ok, ok, cache), ValidationError);
}

TEST(Loss, MseExamples) {
  EXPECT_EQ(mse_loss(std::vector<double>{3, 4}, std::vector<double>{3, 4}), 0.0);
  EXPECT_EQ(mse_loss(std::vector<double>{1}, std::vector<double>{3}), 4.0);
  EXPECT_DOUBLE_EQ(mse_loss(std::vector<double>{3, 5}, std::vector<double>{4, 3}), 2.5);
}

TEST(Backward, ZeroResidualGivesZeroGradients) {
  const ModelConfig c = tiny();
  Rng rng(4);
  const auto p = init_params(c, 3, 3, rng);
  std::vector<double> h(16, 0.5);
  ForwardCache cache;
  forward_into(p, c, 1, 1, h, h, cache);
  Gradients g(p.layout.total, 0.0);
  backward(cache, cache.prediction, p, c, g);
  for (double x : g) EXPECT_EQ(x, 0.0);
}

TEST(Backward, UntouchedIdentifierRowsGetNoGradient) {
  const ModelConfig c = tiny();
  Rng rng(4);
  const auto p = init_params(c, 3, 3, rng);
  std::vector<double> h(16, 0.5);
  ForwardCache cache;
  forward_into(p, c, 1, 2, h, h, cache);
  Gradients g(p.layout.total, 0.0);
  backward(cache, 5.0, p, c, g);
  for (std::size_t row = 0; row < p.layout.user_rows; ++row) {
    for (std::size_t j = 0; j < 4; ++j) {
      const double gu = g[p.layout.user_table + row * 4 + j];
      if (row != 1) EXPECT_EQ(gu, 0.0);
    }
  }
  for (std::size_t row = 0; row < p.layout.item_rows; ++row) {
    for (std::size_t j = 0; j < 4; ++j) {
      if (row != 2) EXPECT_EQ(g[p.layout.item_table + row * 4 + j], 0.0);
    }
  }
}

TEST(Backward, MatchesFiniteDifferences) {
  for (std::uint64_t seed = 100; seed < 105; ++seed) {
    for (auto v : {ModelVariant::kWithReviews, ModelVariant::kIdsOnly}) {
      const auto r = testing::gradient_check(seed, 1e-3, v);
      EXPECT_LE(r.max_rel_error, 1e-4) << "seed " << seed << " worst " << r.worst_parameter;
      EXPECT_GT(r.checked, 50u);
    }
  }
}

TEST(Adam, ZeroGradientLeavesParametersAndAdvancesStep) {
  const ModelConfig c = tiny();
  Rng rng(1);
  auto p = init_params(c, 2, 2, rng);
  const auto before = p.values;
  auto state = AdamState::zeros(p.values.size());
  adam_step(p, Gradients(p.values.size(), 0.0), state, 0.01);
  EXPECT_EQ(p.values, before);
  EXPECT_EQ(state.step, 1u);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  const ModelConfig c = tiny();
  Rng rng(1);
  auto p = init_params(c, 2, 2, rng);
  const auto before = p.values;
  auto state = AdamState::zeros(p.values.size());
  const double lr = 0.001;
  Gradients g(p.values.size(), 0.7);
  adam_step(p, g, state, lr);
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    EXPECT_NEAR(before[i] - p.values[i], lr * 0.7 / (0.7 + 1e-8), 1e-15);
  }
}

TEST(Adam, DeterministicAndRejectsNonFinite) {
  const ModelConfig c = tiny();
  Rng r1(1), r2(1);
  auto a = init_params(c, 2, 2, r1);
  auto b = init_params(c, 2, 2, r2);
  auto sa = AdamState::zeros(a.values.size()), sb = sa;
  Gradients g(a.values.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::sin(double(i));
  for (int s = 0; s < 3; ++s) {
    adam_step(a, g, sa, 0.01);
    adam_step(b, g, sb, 0.01);
  }
  EXPECT_EQ(a.values, b.values);
  g[3] = std::nan("");
  EXPECT_THROW(adam_step(a, g, sa, 0.01), NumericError);
}

TEST(Clamp, Examples) {
  EXPECT_EQ(clamp_rating(5.7), 5.0);
  EXPECT_EQ(clamp_rating(3.2), 3.2);
  EXPECT_EQ(clamp_rating(-0.4), 1.0);
}

std::vector<Instance> toy_instances(std::size_t n, std::size_t nu, std::size_t ni) {
  std::vector<Instance> out;
  for (std::size_t j = 0; j < n; ++j) {
    Instance inst;
    inst.user_index = j % nu;
    inst.item_index = (j * 7) % ni;
    inst.rating = 1.0 + static_cast<double>((inst.user_index + inst.item_index) % 5);
    out.push_back(inst);
  }
  return out;
}

TEST(Train, StepCountArithmetic) {
  ModelConfig c = tiny(ModelVariant::kIdsOnly);
  c.epochs = 50;
  c.batch_size = 256;
  const auto data = toy_instances(5000, 50, 40);
  const auto r = train(c, 50, 40, data, {}, nullptr);
  EXPECT_EQ(r.optimizer_steps, 50u * ((5000 + 255) / 256));
  EXPECT_EQ(r.history.size(), 50u);
  EXPECT_TRUE(std::isnan(r.history.back().validation_loss));
}

TEST(Train, DeterministicAndDescends) {
  ModelConfig c = tiny(ModelVariant::kIdsOnly);
  c.epochs = 20;
  c.learning_rate = 0.01;
  const auto data = toy_instances(600, 20, 15);
  const auto a = train(c, 20, 15, data, data, nullptr);
  const auto b = train(c, 20, 15, data, data, nullptr);
  EXPECT_EQ(a.params.values, b.params.values);
  ASSERT_EQ(a.history.size(), b.history.size());
  for (std::size_t e = 0; e < a.history.size(); ++e) {
    EXPECT_EQ(a.history[e].train_loss, b.history[e].train_loss);
  }
  EXPECT_LT(a.history.back().train_loss, a.initial_train_loss);
}

TEST(Train, LearnableSyntheticDataDescends) {
  SyntheticSpec spec;
  spec.users = 120;
  spec.items = 60;
  const auto syn = make_synthetic(spec, "human");
  ProtocolConfig pc;
  pc.negatives = 20;
  const auto data = prepare_data(filter_min_interactions(syn.corpus), 42, pc, 2);
  ModelConfig c = tiny();
  c.embedding_dim = 32;
  c.epochs = 5;
  c.learning_rate = 0.005;
  const auto r = train(c, data.users.size(), data.items.size(), data.train, data.validation, &syn.store);
  EXPECT_LT(r.history.back().train_loss, r.initial_train_loss);
}

TEST(Train, ReviewModelNeedsStore) {
  const ModelConfig c = tiny();
  const auto data = toy_instances(10, 2, 2);
  EXPECT_THROW(train(c, 2, 2, data, {}, nullptr), ValidationError);
}

TEST(Checkpoint, RoundTripIsBitwise) {
  const auto dir = testing::scratch_dir("ckpt");
  ModelConfig c = tiny();
  c.seed = 77;
  Rng rng(3);
  TrainedModel m{c, IdVocabulary({"u1", "u2"}), IdVocabulary({"h1", "h2", "h3"}),
                 init_params(c, 2, 3, rng)};
  save_checkpoint(dir / "m.bin", m);
  const auto back = load_checkpoint(dir / "m.bin");
  EXPECT_EQ(back.params.values, m.params.values);
  EXPECT_EQ(back.users.ids(), m.users.ids());
  EXPECT_EQ(back.items.ids(), m.items.ids());
  EXPECT_EQ(to_json(back.config), to_json(m.config));
  save_checkpoint(dir / "again.bin", back);
  EXPECT_EQ(sha256_file(dir / "m.bin"), sha256_file(dir / "again.bin"));
}

TEST(Checkpoint, BadMagicIsRejected) {
  const auto dir = testing::scratch_dir("ckpt");
  std::ofstream(dir / "x.bin", std::ios::binary) << "NOTACKPT........";
  EXPECT_THROW(load_checkpoint(dir / "x.bin"), ValidationError);
}

TEST(Vocabulary, UnknownIdsMapToReservedRow) {
  IdVocabulary v({"a", "b"});
  EXPECT_EQ(v.index_of("a"), 0u);
  EXPECT_EQ(v.index_of("b"), 1u);
  EXPECT_EQ(v.index_of("zzz"), 2u);
}

}  // namespace
}  // namespace revlab
