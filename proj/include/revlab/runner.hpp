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

// Config-driven experiment runs: TOML config mapping, workspace loading from
// disk, the scenario matrix with its output files, and the run manifest.

#ifndef REVLAB_RUNNER_HPP_
#define REVLAB_RUNNER_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "revlab/experiment.hpp"

namespace revlab {

struct CorpusEntry {
  std::string label;
  std::filesystem::path path;                  // JSONL corpus
  std::optional<std::filesystem::path> store;  // REVEMB01 file
};

struct ScenarioEntry {
  std::string name;
  ModelVariant variant = ModelVariant::kWithReviews;
  std::optional<std::string> train_history;
  std::optional<std::string> test_history;
  nlohmann::json model_overrides = nlohmann::json::object();
  std::optional<std::string> split_hash;  // pinned digest, checked when set
};

struct ExperimentConfig {
  std::filesystem::path config_path;
  std::string config_sha256;
  std::uint64_t master_seed = 0;
  bool seed_overridden = false;  // REVLAB_SEED or an explicit override
  std::filesystem::path output_dir;
  bool record_timing = false;
  std::string base_label;
  ProtocolConfig protocol;
  ModelConfig model;
  std::vector<CorpusEntry> corpora;  // config order; paths already resolved
  std::vector<ScenarioEntry> scenarios;
  std::vector<std::string> cross_sources;
  std::vector<Comparison> comparisons;
  std::vector<std::string> render_columns;
  std::optional<std::string> sweep_scenario;
  SweepGrid sweep_grid;

  const CorpusEntry& corpus(const std::string& label) const;
};

// Reads REVLAB_SEED; nullopt when unset. Throws ValidationError when the
// value is not an unsigned decimal integer.
std::optional<std::uint64_t> seed_from_environment();

// Parses the TOML config. Relative paths resolve against the config file's
// directory. seed_override (typically seed_from_environment()) replaces
// master_seed. Unknown keys are errors.
ExperimentConfig load_experiment_config(const std::filesystem::path& path,
                                        std::optional<std::uint64_t> seed_override);
ExperimentConfig parse_experiment_config(const nlohmann::json& doc,
                                         const std::filesystem::path& config_path,
                                         std::optional<std::uint64_t> seed_override);

Workspace load_workspace(const ExperimentConfig& cfg);

// Scenario specs with model overrides applied and split hashes filled in.
std::vector<ScenarioSpec> scenario_specs(const ExperimentConfig& cfg, const Workspace& ws);

struct RunResult {
  nlohmann::json manifest;
  std::vector<nlohmann::json> reports;  // scenario order, then cross cells
  std::string table;                    // rendered results, empty without scenarios
};

// Runs every scenario and the cross matrix and writes, under out_dir:
//   split_plan.json, scenarios/<name>/{metrics.json,loss_history.json,
//   checkpoint.bin}, cross/matrix.json, cross/<train>_to_<test>.metrics.json,
//   cross/<train>.checkpoint.bin,
//   results.txt and manifest.json.
// Everything except the optional timing block is a pure function of the
// inputs, the config bytes and the master seed.
RunResult run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);
RunResult run_experiment(const ExperimentConfig& cfg);

struct VerifyResult {
  bool ok = true;
  bool reproducibility = false;  // divergence came from a rerun, not a file edit
  std::vector<std::string> divergences;  // first entry is the first divergence
};

// Recomputes the config, input and output digests named by the manifest.
// With rerun, also repeats the whole run into a scratch directory and
// compares every output digest.
VerifyResult verify_manifest(const std::filesystem::path& manifest_path,
                             const std::filesystem::path& config_path, bool rerun);

// Writes `text` atomically enough for our purposes: temp file then rename.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace revlab

#endif  // REVLAB_RUNNER_HPP_
