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

#include <cstdlib>
#include <fstream>

#include "revlab/digest.hpp"
#include "revlab/error.hpp"
#include "revlab/runner.hpp"
#include "workspace.hpp"

namespace revlab {
namespace {

namespace fs = std::filesystem;

std::string with_line(std::string config, const std::string& after, const std::string& line) {
  const auto pos = config.find(after);
  config.insert(pos + after.size(), "\n" + line);
  return config;
}

TEST(Config, ParsesAndDerivesModelSeed) {
  const auto path = testing::small_workspace("cfg");
  const auto cfg = load_experiment_config(path, std::nullopt);
  EXPECT_EQ(cfg.master_seed, 7u);
  EXPECT_FALSE(cfg.seed_overridden);
  EXPECT_EQ(cfg.model.seed, derive_seed(7, "model"));
  EXPECT_EQ(cfg.model.latent_dim, 8u);
  EXPECT_EQ(cfg.protocol.negatives, 20u);
  EXPECT_EQ(cfg.corpora.size(), 2u);
  EXPECT_EQ(cfg.corpus("genai").path, path.parent_path() / "data/genai.jsonl");
  EXPECT_EQ(cfg.scenarios[0].variant, ModelVariant::kIdsOnly);
  EXPECT_EQ(cfg.config_sha256, sha256_file(path));
  EXPECT_EQ(cfg.output_dir, path.parent_path() / "out");

  const auto over = load_experiment_config(path, 99);
  EXPECT_EQ(over.master_seed, 99u);
  EXPECT_TRUE(over.seed_overridden);
  EXPECT_EQ(over.model.seed, derive_seed(99, "model"));
}

TEST(Config, RejectsBadInput) {
  const std::string base = testing::kSmallConfig;
  auto rejects = [](const std::string& text) {
    const auto dir = testing::scratch_dir("badcfg");
    write_text_file(dir / "x.toml", text);
    EXPECT_THROW(load_experiment_config(dir / "x.toml", std::nullopt), ValidationError) << text;
  };
  rejects(with_line(base, "base = \"human\"", "colour = 1"));
  rejects(with_line(base, "[protocol]", "negativs = 3"));
  rejects(with_line(base, "[protocol]", "filter = \"sometimes\""));
  rejects(with_line(base, "[model]", "reduction = 2.0"));
  rejects(with_line(base, "name = \"NCF-Human\"", "variant = \"ids_only\""));
  std::string no_base = base;
  no_base.replace(no_base.find("base = \"human\""), 14, "base = \"other\"");
  rejects(no_base);
  rejects(base + "\n[[scenario]]\nname = \"NCF\"\nvariant = \"ids_only\"\n");
  rejects(base + "\n[[scenario]]\nname = \"X\"\nhistory = \"nobody\"\n");
}

TEST(Config, SeedFromEnvironment) {
  ::unsetenv("REVLAB_SEED");
  EXPECT_FALSE(seed_from_environment().has_value());
  ::setenv("REVLAB_SEED", "123", 1);
  EXPECT_EQ(seed_from_environment(), 123u);
  ::setenv("REVLAB_SEED", "12x", 1);
  EXPECT_THROW(seed_from_environment(), ValidationError);
  ::setenv("REVLAB_SEED", "-1", 1);
  EXPECT_THROW(seed_from_environment(), ValidationError);
  ::unsetenv("REVLAB_SEED");
}

class RunTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    config_path_ = new fs::path(testing::small_workspace("run"));
    const auto cfg = load_experiment_config(*config_path_, std::nullopt);
    first_ = new RunResult(run_experiment(cfg, config_path_->parent_path() / "out"));
  }
  static void TearDownTestSuite() {
    delete first_;
    delete config_path_;
  }
  static fs::path dir() { return config_path_->parent_path(); }

  static fs::path* config_path_;
  static RunResult* first_;
};

fs::path* RunTest::config_path_ = nullptr;
RunResult* RunTest::first_ = nullptr;

TEST_F(RunTest, WritesExpectedOutputs) {
  for (const char* rel : {"split_plan.json", "scenarios/NCF/metrics.json", "scenarios/NCF-Human/checkpoint.bin",
                          "scenarios/NCF/loss_history.json", "cross/matrix.json",
                          "cross/human_to_genai.metrics.json", "cross/genai.checkpoint.bin", "results.txt",
                          "manifest.json"}) {
    EXPECT_TRUE(fs::exists(dir() / "out" / rel)) << rel;
  }
  const auto& m = first_->manifest;
  EXPECT_EQ(m["master_seed"], 7);
  EXPECT_FALSE(m.contains("timing"));
  EXPECT_EQ(m["inputs"].size(), 2u);
  EXPECT_EQ(m["inputs"][0]["corpus"]["path"], "data/human.jsonl");
  for (const char* rel : {"results.txt", "split_plan.json", "cross/matrix.json", "scenarios/NCF/metrics.json"}) {
    EXPECT_TRUE(m["outputs"].contains(rel)) << rel;
  }
  EXPECT_FALSE(m["outputs"].contains("manifest.json"));
  EXPECT_NE(first_->table.find("NCF-Human"), std::string::npos);
}

TEST_F(RunTest, ByteIdenticalAcrossRuns) {
  const auto cfg = load_experiment_config(*config_path_, std::nullopt);
  run_experiment(cfg, dir() / "again");
  for (const auto& [rel, digest] : first_->manifest["outputs"].items()) {
    EXPECT_EQ(sha256_file(dir() / "again" / rel), digest.get<std::string>()) << rel;
  }
  EXPECT_EQ(read_text_file(dir() / "out" / "manifest.json"), read_text_file(dir() / "again" / "manifest.json"));
}

TEST_F(RunTest, CrossCellsShareCheckpoints) {
  const auto matrix = nlohmann::json::parse(read_text_file(dir() / "out" / "cross/matrix.json"));
  std::map<std::string, std::string> by_train;
  std::size_t cells = 0;
  for (const auto& cell : matrix["cells"]) {
    ++cells;
    const auto train = cell["train"].get<std::string>();
    const auto digest = cell["checkpoint_digest"].get<std::string>();
    auto [it, fresh] = by_train.emplace(train, digest);
    if (!fresh) EXPECT_EQ(it->second, digest);
  }
  EXPECT_EQ(cells, 4u);
  EXPECT_EQ(by_train.size(), 2u);
  EXPECT_NE(by_train["human"], by_train["genai"]);
}

TEST_F(RunTest, ReportsShareTheSplit) {
  std::set<std::string> hashes;
  for (const auto& r : first_->reports) hashes.insert(r["split_hash"].get<std::string>());
  EXPECT_EQ(hashes.size(), 1u);
  EXPECT_EQ(*hashes.begin(), first_->manifest["split_hash"]);
}

TEST_F(RunTest, VerifyPassesOnUntouchedWorkspace) {
  const auto r = verify_manifest(dir() / "out" / "manifest.json", *config_path_, true);
  EXPECT_TRUE(r.ok) << (r.divergences.empty() ? "" : r.divergences.front());
}

TEST_F(RunTest, VerifyNamesEditedCorpus) {
  const auto copy = fs::path(dir().string() + "-edited");
  fs::copy(dir(), copy, fs::copy_options::recursive);
  auto text = read_text_file(copy / "data/genai.jsonl");
  text.replace(text.find("\"overall_rating\":"), 17, "\"overall_rating\": ");
  write_text_file(copy / "data/genai.jsonl", text);
  const auto r = verify_manifest(copy / "out" / "manifest.json", copy / "exp.toml", false);
  ASSERT_FALSE(r.ok);
  EXPECT_NE(r.divergences.front().find("corpus digest [genai]"), std::string::npos) << r.divergences.front();
}

TEST_F(RunTest, VerifyNamesConfigHash) {
  const auto copy = fs::path(dir().string() + "-reseeded");
  fs::copy(dir(), copy, fs::copy_options::recursive);
  auto text = read_text_file(copy / "exp.toml");
  text.replace(text.find("master_seed = 7"), 15, "master_seed = 8");
  write_text_file(copy / "exp.toml", text);
  const auto r = verify_manifest(copy / "out" / "manifest.json", copy / "exp.toml", false);
  ASSERT_FALSE(r.ok);
  EXPECT_NE(r.divergences.front().find("config hash"), std::string::npos) << r.divergences.front();
}

TEST_F(RunTest, VerifyNamesEditedOutput) {
  const auto copy = fs::path(dir().string() + "-tampered");
  fs::copy(dir(), copy, fs::copy_options::recursive);
  write_text_file(copy / "out" / "results.txt", "edited\n");
  const auto r = verify_manifest(copy / "out" / "manifest.json", copy / "exp.toml", false);
  ASSERT_FALSE(r.ok);
  EXPECT_NE(r.divergences.front().find("results.txt"), std::string::npos) << r.divergences.front();
}

TEST_F(RunTest, VerifyMissingInputIsValidationError) {
  const auto copy = fs::path(dir().string() + "-missing");
  fs::copy(dir(), copy, fs::copy_options::recursive);
  fs::remove(copy / "data/human.emb");
  EXPECT_THROW(verify_manifest(copy / "out" / "manifest.json", copy / "exp.toml", false), ValidationError);
}

TEST_F(RunTest, PinnedSplitHashMismatchAborts) {
  auto cfg = load_experiment_config(*config_path_, std::nullopt);
  const auto ws = load_workspace(cfg);
  auto specs = scenario_specs(cfg, ws);
  specs[0].split_hash = std::string(64, '0');
  EXPECT_THROW(run_scenario(ws, specs[0]), ReproducibilityError);
}

TEST(Render, PercentChangeAndStars) {
  auto report = [](const std::string& name, std::vector<double> sq) {
    double mean = 0;
    for (double x : sq) mean += x;
    mean /= sq.size();
    return nlohmann::json{{"scenario", name},
                          {"split_hash", "h"},
                          {"metrics", {{"rmse", {{"value", std::sqrt(mean)}, {"n", sq.size()}}}}},
                          {"per_instance", {{"rmse", sq}}}};
  };
  // Squared errors chosen so the aggregate RMSEs are 1.154 and 1.014.
  const double b = 1.154 * 1.154, t = 1.014 * 1.014;
  const auto base = report("NCF", {b - 0.3, b + 0.3, b - 0.1, b + 0.1});
  const auto treat = report("NCF-Human", {t - 0.2, t + 0.1, t - 0.3, t + 0.4});
  const auto table = render_results_table({base, treat}, {{"NCF", "NCF-Human"}});
  EXPECT_NE(table.find("a 12.1% reduction"), std::string::npos) << table;

  const auto same = render_results_table({base, report("Copy", {b - 0.3, b + 0.3, b - 0.1, b + 0.1})},
                                         {{"NCF", "Copy"}});
  const auto rows = same.substr(0, same.find("\n* p"));
  EXPECT_EQ(rows.find('*'), std::string::npos) << same;
  EXPECT_NE(rows.find("0.0% reduction"), std::string::npos) << same;

  auto other = treat;
  other["split_hash"] = "different";
  EXPECT_THROW(render_results_table({base, other}, {{"NCF", "NCF-Human"}}), ValidationError);
}

}  // namespace
}  // namespace revlab
