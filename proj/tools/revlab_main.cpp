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

// revlab command-line driver. Exit codes: 0 success, 2 validation failure,
// 3 reproducibility failure, 1 anything else.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "revlab/corpus.hpp"
#include "revlab/digest.hpp"
#include "revlab/embeddings.hpp"
#include "revlab/error.hpp"
#include "revlab/experiment.hpp"
#include "revlab/prompts.hpp"
#include "revlab/runner.hpp"
#include "revlab/synthetic.hpp"
#include "revlab/textstats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace revlab;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitReproducibility = 3;

void write_or_print(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    write_text_file(out, text);
  }
}

ExperimentConfig config_from(const std::string& path) {
  return load_experiment_config(path, seed_from_environment());
}

const ScenarioSpec& find_spec(const std::vector<ScenarioSpec>& specs, const std::string& name) {
  for (const auto& s : specs) {
    if (s.name == name) return s;
  }
  throw ValidationError("no scenario named '" + name + "' in the config");
}

json corpus_summary(const Corpus& c) {
  std::set<std::string> users, items;
  for (const auto& r : c.records()) {
    users.insert(r.user_id);
    items.insert(r.item_id);
  }
  const auto stats = corpus_stats(c);
  return {{"label", c.label()},
          {"records", c.size()},
          {"users", users.size()},
          {"items", items.size()},
          {"avg_word_count", stats.avg_word_count},
          {"avg_char_count", stats.avg_char_count},
          {"vocabulary_size", stats.vocabulary_size}};
}

int run_cli(int argc, char** argv) {
  CLI::App app{"revlab: review-augmented recommender experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kSoftwareVersion);

  // ingest
  std::string ingest_in, ingest_label = "corpus", ingest_out;
  auto* ingest = app.add_subcommand("ingest", "Validate a JSONL corpus and print a summary");
  ingest->add_option("input", ingest_in, "JSONL corpus")->required()->check(CLI::ExistingFile);
  ingest->add_option("--label", ingest_label, "Corpus label");
  ingest->add_option("-o,--output", ingest_out, "Write the normalized corpus here");
  ingest->callback([&] {
    const Corpus c = load_corpus(ingest_in, ingest_label);
    if (!ingest_out.empty()) write_corpus(ingest_out, c);
    json s = corpus_summary(c);
    s["sha256"] = sha256_file(ingest_in);
    std::cout << s.dump(2) << "\n";
  });

  // filter
  std::string filter_in, filter_out, filter_mode = "fixpoint";
  int filter_min = 5;
  auto* filter = app.add_subcommand("filter", "Apply the minimum-interaction filter");
  filter->add_option("input", filter_in)->required()->check(CLI::ExistingFile);
  filter->add_option("-o,--output", filter_out)->required();
  filter->add_option("--min", filter_min, "Minimum reviews per user and item")->check(CLI::PositiveNumber);
  filter->add_option("--mode", filter_mode)->check(CLI::IsMember({"fixpoint", "single_pass"}));
  filter->callback([&] {
    const Corpus c = load_corpus(filter_in, "input");
    const Corpus f = filter_min_interactions(
        c, filter_min, filter_mode == "fixpoint" ? FilterMode::kFixpoint : FilterMode::kSinglePass);
    write_corpus(filter_out, f);
    std::cout << json{{"input", corpus_summary(c)}, {"output", corpus_summary(f)}}.dump(2) << "\n";
  });

  // stub-embed
  std::string stub_in, stub_out;
  std::uint32_t stub_dim = 384;
  std::uint64_t stub_seed = 0;
  auto* stub = app.add_subcommand("stub-embed", "Write deterministic text-hash embeddings");
  stub->add_option("input", stub_in)->required()->check(CLI::ExistingFile);
  stub->add_option("-o,--output", stub_out)->required();
  stub->add_option("--dim", stub_dim)->check(CLI::PositiveNumber);
  stub->add_option("--seed", stub_seed);
  stub->callback([&] {
    const Corpus c = load_corpus(stub_in, "input");
    const auto store = stub_store(c, stub_seed, stub_dim);
    write_store(stub_out, store);
    std::cout << json{{"vectors", store.size()}, {"dim", store.dim()},
                      {"sha256", sha256_file(stub_out)}}.dump(2) << "\n";
  });

  // split
  std::string split_cfg, split_out;
  auto* split = app.add_subcommand("split", "Build the shared split plan and print its digest");
  split->add_option("-c,--config", split_cfg)->required()->check(CLI::ExistingFile);
  split->add_option("-o,--output", split_out, "Write split_plan JSON here");
  split->callback([&] {
    const auto cfg = config_from(split_cfg);
    const Workspace ws = load_workspace(cfg);
    if (!split_out.empty()) write_text_file(split_out, to_json(ws.data.plan).dump(2) + "\n");
    std::cout << json{{"split_hash", ws.data.split_hash},
                      {"selection_digest", ws.data.selection_digest},
                      {"users", ws.data.plan.users.size()},
                      {"train", ws.data.train.size()},
                      {"validation", ws.data.validation.size()},
                      {"test", ws.data.test.size()},
                      {"ranking_cases", ws.data.ranking.size()}}.dump(2) << "\n";
  });

  // train
  std::string train_cfg, train_scenario_name, train_out;
  auto* train_cmd = app.add_subcommand("train", "Train one scenario and save its checkpoint");
  train_cmd->add_option("-c,--config", train_cfg)->required()->check(CLI::ExistingFile);
  train_cmd->add_option("-s,--scenario", train_scenario_name)->required();
  train_cmd->add_option("-o,--output", train_out, "Checkpoint path")->required();
  train_cmd->callback([&] {
    const auto cfg = config_from(train_cfg);
    const Workspace ws = load_workspace(cfg);
    const auto specs = scenario_specs(cfg, ws);
    const auto trained = train_scenario(ws, find_spec(specs, train_scenario_name));
    save_checkpoint(train_out, trained.model);
    const auto& last = trained.training.history.back();
    std::cout << json{{"scenario", train_scenario_name},
                      {"initial_train_loss", trained.training.initial_train_loss},
                      {"final_train_loss", last.train_loss},
                      {"optimizer_steps", trained.training.optimizer_steps},
                      {"checkpoint_sha256", sha256_file(train_out)}}.dump(2) << "\n";
  });

  // evaluate
  std::string eval_cfg, eval_scenario, eval_ckpt, eval_out;
  auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate a checkpoint on the shared split");
  eval_cmd->add_option("-c,--config", eval_cfg)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("-s,--scenario", eval_scenario)->required();
  eval_cmd->add_option("--checkpoint", eval_ckpt)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("-o,--output", eval_out, "Metric report path (default stdout)");
  eval_cmd->callback([&] {
    const auto cfg = config_from(eval_cfg);
    const Workspace ws = load_workspace(cfg);
    const auto specs = scenario_specs(cfg, ws);
    const auto& spec = find_spec(specs, eval_scenario);
    const TrainedModel model = load_checkpoint(eval_ckpt);
    const auto eval = evaluate(model, ws.data, ws.store_for(spec.test_history), ws.protocol);
    write_or_print(metrics_report(spec.name, ws.data.split_hash, eval).dump(2) + "\n", eval_out);
  });

  // textstats
  std::string ts_base, ts_other, ts_base_store, ts_other_store, ts_lexicon, ts_stopwords;
  std::string ts_base_labels, ts_other_labels, ts_out, ts_features, ts_sentiment = "lexicon";
  std::size_t ts_sample = 1000;
  std::uint64_t ts_seed = 0;
  double ts_threshold = 0.5;
  auto* ts = app.add_subcommand("textstats", "Compare a corpus with an aligned counterpart");
  ts->add_option("--base", ts_base)->required()->check(CLI::ExistingFile);
  ts->add_option("--other", ts_other)->required()->check(CLI::ExistingFile);
  ts->add_option("--base-store", ts_base_store)->check(CLI::ExistingFile);
  ts->add_option("--other-store", ts_other_store)->check(CLI::ExistingFile);
  ts->add_option("--lexicon", ts_lexicon)->check(CLI::ExistingFile);
  ts->add_option("--stopwords", ts_stopwords)->check(CLI::ExistingFile);
  ts->add_option("--base-labels", ts_base_labels)->check(CLI::ExistingFile);
  ts->add_option("--other-labels", ts_other_labels)->check(CLI::ExistingFile);
  ts->add_option("--sentiment", ts_sentiment)->check(CLI::IsMember({"lexicon", "labels"}));
  ts->add_option("--valence-threshold", ts_threshold);
  ts->add_option("--sample", ts_sample)->check(CLI::PositiveNumber);
  ts->add_option("--seed", ts_seed);
  ts->add_option("-o,--output", ts_out, "Report path (default stdout)");
  ts->add_option("--features", ts_features, "Write per-review feature rows (CSV) here");
  ts->callback([&] {
    const Corpus base = load_corpus(ts_base, "base");
    const Corpus other = load_corpus(ts_other, "other");
    std::optional<EmbeddingStore> bs, os;
    if (!ts_base_store.empty()) bs = open_store(ts_base_store);
    if (!ts_other_store.empty()) os = open_store(ts_other_store);
    std::optional<LabelFile> bl, ol;
    if (!ts_base_labels.empty()) bl = load_label_file(ts_base_labels);
    if (!ts_other_labels.empty()) ol = load_label_file(ts_other_labels);
    ComparisonConfig cc;
    if (!ts_lexicon.empty()) cc.lexicon = load_lexicon(ts_lexicon);
    if (!ts_stopwords.empty()) cc.stopwords = load_stopwords(ts_stopwords);
    cc.valence_threshold = ts_threshold;
    cc.sentiment_source =
        ts_sentiment == "labels" ? SentimentSource::kLabelFile : SentimentSource::kLexicon;
    cc.base_labels = bl ? &*bl : nullptr;
    cc.other_labels = ol ? &*ol : nullptr;
    const auto sample = sample_reviews(base, ts_sample, ts_seed);
    const CorpusSide b{&base, bs ? &*bs : nullptr};
    const CorpusSide o{&other, os ? &*os : nullptr};
    write_or_print(corpus_comparison_report(b, o, sample, cc).dump(2) + "\n", ts_out);
    if (!ts_features.empty()) {
      write_text_file(ts_features, feature_rows_csv(b, sample, cc, cc.base_labels) +
                                       feature_rows_csv(o, sample, cc, cc.other_labels));
    }
  });

  // cross-matrix
  std::string cross_cfg, cross_out;
  auto* cross = app.add_subcommand("cross-matrix", "Run the train/test source grid");
  cross->add_option("-c,--config", cross_cfg)->required()->check(CLI::ExistingFile);
  cross->add_option("-o,--output", cross_out, "Matrix JSON path (default stdout)");
  cross->callback([&] {
    const auto cfg = config_from(cross_cfg);
    if (cfg.cross_sources.empty()) throw ValidationError("config has no [cross] sources");
    const Workspace ws = load_workspace(cfg);
    ModelConfig base = cfg.model;
    base.variant = ModelVariant::kWithReviews;
    const auto m = run_cross_matrix(ws, cfg.cross_sources, base);
    json out = to_json(m);
    out["split_hash"] = ws.data.split_hash;
    write_or_print(out.dump(2) + "\n", cross_out);
  });

  // render
  std::vector<std::string> render_reports, render_pairs, render_columns;
  bool render_csv = false;
  std::string render_out;
  auto* render = app.add_subcommand("render", "Render metric reports as a results table");
  render->add_option("reports", render_reports, "metrics.json files")->required()->check(CLI::ExistingFile);
  render->add_option("--compare", render_pairs, "BASELINE:TREATMENT scenario pair (repeatable)")
      ->allow_extra_args(false);
  render->add_option("--columns", render_columns, "Metric columns");
  render->add_flag("--csv", render_csv);
  render->add_option("-o,--output", render_out);
  render->callback([&] {
    std::vector<json> reports;
    for (const auto& p : render_reports) reports.push_back(json::parse(read_text_file(p)));
    std::vector<Comparison> comparisons;
    for (const auto& pair : render_pairs) {
      const auto colon = pair.find(':');
      if (colon == std::string::npos) {
        throw ValidationError("--compare expects BASELINE:TREATMENT, got '" + pair + "'");
      }
      comparisons.push_back({pair.substr(0, colon), pair.substr(colon + 1)});
    }
    write_or_print(render_results_table(reports, comparisons, render_columns,
                                        render_csv ? TableFormat::kCsv : TableFormat::kText),
                   render_out);
  });

  // verify
  std::string verify_cfg, verify_manifest_path;
  bool verify_rerun = false;
  int verify_status = 0;
  auto* verify = app.add_subcommand("verify", "Check a run manifest against the workspace");
  verify->add_option("-c,--config", verify_cfg)->required()->check(CLI::ExistingFile);
  verify->add_option("-m,--manifest", verify_manifest_path)->required();
  verify->add_flag("--rerun", verify_rerun, "Repeat the run and compare output digests");
  verify->callback([&] {
    const auto v = verify_manifest(verify_manifest_path, verify_cfg, verify_rerun);
    if (v.ok) {
      std::cout << "verify: ok\n";
      return;
    }
    std::cout << "verify: FAILED at " << v.divergences.front() << "\n";
    for (std::size_t i = 1; i < v.divergences.size(); ++i) {
      std::cout << "  also: " << v.divergences[i] << "\n";
    }
    verify_status = kExitReproducibility;
  });

  // sweep
  std::string sweep_cfg, sweep_out;
  auto* sweep = app.add_subcommand("sweep", "Grid search over the configured hyperparameters");
  sweep->add_option("-c,--config", sweep_cfg)->required()->check(CLI::ExistingFile);
  sweep->add_option("-o,--output", sweep_out, "Sweep JSON path (default stdout)");
  sweep->callback([&] {
    const auto cfg = config_from(sweep_cfg);
    if (!cfg.sweep_scenario) throw ValidationError("config has no [sweep] table");
    const Workspace ws = load_workspace(cfg);
    const auto specs = scenario_specs(cfg, ws);
    const auto points = run_sweep(ws, find_spec(specs, *cfg.sweep_scenario), cfg.sweep_grid);
    write_or_print(to_json(points).dump(2) + "\n", sweep_out);
  });

  // run
  std::string run_cfg, run_out;
  auto* run = app.add_subcommand("run", "Run every scenario and the cross grid, write the manifest");
  run->add_option("-c,--config", run_cfg)->required()->check(CLI::ExistingFile);
  run->add_option("-o,--output-dir", run_out, "Overrides output_dir from the config");
  run->callback([&] {
    const auto cfg = config_from(run_cfg);
    const auto result = run_out.empty() ? run_experiment(cfg) : run_experiment(cfg, run_out);
    std::cout << result.table;
    std::cout << "split_hash " << result.manifest.at("split_hash").get<std::string>() << "\n";
  });

  // synth
  std::string synth_dir;
  SyntheticSpec synth_spec;
  double synth_retain = 0.3;
  auto* synth = app.add_subcommand("synth", "Write the planted-signal fixture corpora and stores");
  synth->add_option("-o,--output-dir", synth_dir)->required();
  synth->add_option("--users", synth_spec.users)->check(CLI::PositiveNumber);
  synth->add_option("--items", synth_spec.items)->check(CLI::PositiveNumber);
  synth->add_option("--seed", synth_spec.seed);
  synth->add_option("--dim", synth_spec.embedding_dim)->check(CLI::PositiveNumber);
  synth->add_option("--retain", synth_retain, "Deviation kept by the homogenized store")
      ->check(CLI::Range(0.0, 1.0));
  synth->callback([&] {
    const auto data = make_synthetic(synth_spec, "human");
    const fs::path dir(synth_dir);
    fs::create_directories(dir);
    write_corpus(dir / "human.jsonl", data.corpus);
    write_corpus(dir / "genai.jsonl", data.corpus.with_records(data.corpus.records()));
    write_store(dir / "human.emb", data.store);
    write_store(dir / "genai.emb", homogenize(data.store, synth_retain, "homogenized"));
    std::cout << corpus_summary(data.corpus).dump(2) << "\n";
  });

  // prompt
  std::string prompt_scenario = "user_centric", prompt_corpus;
  std::int64_t prompt_review = -1;
  bool prompt_list = false;
  auto* prompt = app.add_subcommand("prompt", "Show prompt templates or fill one from a review");
  prompt->add_option("--scenario", prompt_scenario)
      ->check(CLI::IsMember({"user_centric", "platform_neutral", "encouraging", "constructive",
                             "critical"}));
  prompt->add_option("--corpus", prompt_corpus)->check(CLI::ExistingFile);
  prompt->add_option("--review-id", prompt_review);
  prompt->add_flag("--list", prompt_list, "List embedded assets with their SHA-256");
  prompt->callback([&] {
    if (prompt_list) {
      for (const auto& name : prompt_asset_names()) {
        std::cout << sha256_hex(prompt_asset(name)) << "  " << name << "\n";
      }
      return;
    }
    const auto s = prompt_scenario_from_string(prompt_scenario);
    const auto bundle = prompt_bundle(s);
    json out = {{"scenario", prompt_scenario}, {"system", bundle.system_message}};
    if (!prompt_corpus.empty()) {
      const Corpus c = load_corpus(prompt_corpus, "prompt");
      const ReviewRecord* r = c.find(prompt_review);
      if (r == nullptr) throw ValidationError("review id not in corpus");
      out["user"] = s == PromptScenario::kUserCentric ? fill_user_centric(*r) : fill_platform(*r);
    } else {
      out["user_template"] = bundle.user_template;
    }
    std::cout << out.dump(2) << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }
  return verify_status;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ReproducibilityError& e) {
    std::cerr << "reproducibility error: " << e.what() << "\n";
    return kExitReproducibility;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
