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

#include "revlab/runner.hpp"

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "revlab/digest.hpp"
#include "revlab/error.hpp"
#include "revlab/rng.hpp"
#include "revlab/toml.hpp"

namespace revlab {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Tracks which keys of a table were read so leftovers can be reported.
class Table {
 public:
  Table(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ValidationError(where_ + ": expected a table");
  }

  const json* get(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  const json& require(const std::string& key) {
    const json* v = get(key);
    if (v == nullptr) throw ValidationError(where_ + ": missing key '" + key + "'");
    return *v;
  }

  template <typename T>
  T value(const std::string& key, T fallback) {
    const json* v = get(key);
    return v == nullptr ? fallback : as<T>(*v, key);
  }

  template <typename T>
  T as(const json& v, const std::string& key) const {
    try {
      if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
        if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
          throw ValidationError(where_ + "." + key + ": expected a non-negative integer");
        }
      }
      if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ValidationError(where_ + "." + key + ": expected a string");
      }
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ValidationError(where_ + "." + key + ": expected a boolean");
      }
      return v.get<T>();
    } catch (const json::exception& e) {
      throw ValidationError(where_ + "." + key + ": " + e.what());
    }
  }

  void finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (!seen_.contains(key)) throw ValidationError(where_ + ": unknown key '" + key + "'");
    }
  }

  const std::string& where() const { return where_; }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

std::vector<std::string> string_list(Table& t, const std::string& key) {
  const json* v = t.get(key);
  if (v == nullptr) return {};
  if (!v->is_array()) throw ValidationError(t.where() + "." + key + ": expected an array");
  std::vector<std::string> out;
  for (const auto& e : *v) out.push_back(t.as<std::string>(e, key));
  return out;
}

template <typename T>
std::vector<T> number_list(Table& t, const std::string& key, std::vector<T> fallback) {
  const json* v = t.get(key);
  if (v == nullptr) return fallback;
  if (!v->is_array() || v->empty()) {
    throw ValidationError(t.where() + "." + key + ": expected a non-empty array");
  }
  std::vector<T> out;
  for (const auto& e : *v) out.push_back(t.as<T>(e, key));
  return out;
}

ProtocolConfig parse_protocol(const json* j) {
  ProtocolConfig p;
  if (j == nullptr) return p;
  Table t(*j, "protocol");
  p.min_interactions = static_cast<int>(t.value<std::size_t>("min_interactions", 5));
  const auto filter = t.value<std::string>("filter", "fixpoint");
  if (filter == "fixpoint") {
    p.filter_mode = FilterMode::kFixpoint;
  } else if (filter == "single_pass") {
    p.filter_mode = FilterMode::kSinglePass;
  } else {
    throw ValidationError("protocol.filter: expected fixpoint or single_pass");
  }
  p.validation_fraction = t.value<double>("validation_fraction", p.validation_fraction);
  if (!(p.validation_fraction > 0.0 && p.validation_fraction < 1.0)) {
    throw ValidationError("protocol.validation_fraction must lie in (0, 1)");
  }
  p.negatives = t.value<std::size_t>("negatives", p.negatives);
  const auto short_history = t.value<std::string>("short_history", "pad");
  if (short_history == "pad") {
    p.short_history = ShortHistoryPolicy::kPad;
  } else if (short_history == "drop") {
    p.short_history = ShortHistoryPolicy::kDrop;
  } else {
    throw ValidationError("protocol.short_history: expected pad or drop");
  }
  p.ranking_cutoffs = number_list<std::size_t>(t, "ranking_cutoffs", p.ranking_cutoffs);
  p.business_k = t.value<std::size_t>("business_k", p.business_k);
  p.popularity_rank = t.value<bool>("popularity_rank", p.popularity_rank);
  t.finish();
  return p;
}

ModelConfig apply_overrides(const ModelConfig& base, const json& overrides,
                            const std::string& where) {
  json merged = to_json(base);
  for (const auto& [key, value] : overrides.items()) {
    if (!merged.contains(key)) throw ValidationError(where + ": unknown key '" + key + "'");
    if (merged[key].is_number_unsigned() &&
        (!value.is_number_integer() || value.get<std::int64_t>() < 0)) {
      throw ValidationError(where + "." + key + ": expected a non-negative integer");
    }
    merged[key] = value;
  }
  return model_config_from_json(merged);
}

fs::path resolve(const fs::path& base_dir, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : (base_dir / path).lexically_normal();
}

std::string relative_name(const fs::path& p, const fs::path& base_dir) {
  auto rel = p.lexically_relative(base_dir);
  return (rel.empty() ? p : rel).generic_string();
}

json loss_history_json(const std::string& name, const TrainResult& r) {
  json epochs = json::array();
  for (const auto& e : r.history) {
    epochs.push_back({{"epoch", e.epoch},
                      {"train_loss", e.train_loss},
                      {"validation_loss", std::isfinite(e.validation_loss)
                                              ? json(e.validation_loss)
                                              : json(nullptr)}});
  }
  return {{"scenario", name},
          {"initial_train_loss", r.initial_train_loss},
          {"optimizer_steps", r.optimizer_steps},
          {"epochs", std::move(epochs)}};
}

std::string pretty(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

const CorpusEntry& ExperimentConfig::corpus(const std::string& label) const {
  for (const auto& c : corpora) {
    if (c.label == label) return c;
  }
  throw ValidationError("no corpus labelled '" + label + "'");
}

std::optional<std::uint64_t> seed_from_environment() {
  const char* raw = std::getenv("REVLAB_SEED");
  if (raw == nullptr) return std::nullopt;
  std::string s(raw);
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos || s.size() > 20) {
    throw ValidationError("REVLAB_SEED must be an unsigned decimal integer, got '" + s + "'");
  }
  errno = 0;
  const unsigned long long v = std::strtoull(s.c_str(), nullptr, 10);
  if (errno == ERANGE) throw ValidationError("REVLAB_SEED out of range: " + s);
  return static_cast<std::uint64_t>(v);
}

ExperimentConfig load_experiment_config(const fs::path& path,
                                        std::optional<std::uint64_t> seed_override) {
  const std::string bytes = read_text_file(path);
  ExperimentConfig cfg =
      parse_experiment_config(parse_toml(bytes, path.string()), path, seed_override);
  cfg.config_sha256 = sha256_hex(bytes);
  return cfg;
}

ExperimentConfig parse_experiment_config(const json& doc, const fs::path& config_path,
                                         std::optional<std::uint64_t> seed_override) {
  ExperimentConfig cfg;
  cfg.config_path = config_path;
  const fs::path dir = config_path.parent_path();
  Table top(doc, "config");

  const std::uint64_t declared_seed = top.value<std::uint64_t>("master_seed", 0);
  cfg.master_seed = seed_override.value_or(declared_seed);
  cfg.seed_overridden = seed_override.has_value();
  cfg.output_dir = resolve(dir, top.value<std::string>("output_dir", "revlab-out"));
  cfg.record_timing = top.value<bool>("record_timing", false);
  cfg.protocol = parse_protocol(top.get("protocol"));

  ModelConfig model;
  model.seed = derive_seed(cfg.master_seed, "model");
  if (const json* m = top.get("model")) {
    if (!m->is_object()) throw ValidationError("model: expected a table");
    model = apply_overrides(model, *m, "model");
  }
  cfg.model = model;

  std::set<std::string> labels;
  if (const json* list = top.get("corpus")) {
    if (!list->is_array()) throw ValidationError("corpus: expected [[corpus]] entries");
    for (const auto& e : *list) {
      Table t(e, "corpus[" + std::to_string(cfg.corpora.size()) + "]");
      CorpusEntry c;
      c.label = t.as<std::string>(t.require("label"), "label");
      c.path = resolve(dir, t.as<std::string>(t.require("path"), "path"));
      if (const json* s = t.get("store")) c.store = resolve(dir, t.as<std::string>(*s, "store"));
      t.finish();
      if (!labels.insert(c.label).second) {
        throw ValidationError("corpus label '" + c.label + "' declared twice");
      }
      cfg.corpora.push_back(std::move(c));
    }
  }
  if (cfg.corpora.empty()) throw ValidationError("config declares no [[corpus]]");
  cfg.base_label = top.value<std::string>("base", cfg.corpora.front().label);
  if (!labels.contains(cfg.base_label)) {
    throw ValidationError("base corpus '" + cfg.base_label + "' is not declared");
  }

  auto check_source = [&](const std::string& label, const std::string& where) {
    const auto& c = cfg.corpus(label);
    if (!c.store) throw ValidationError(where + ": corpus '" + label + "' has no store");
  };

  std::set<std::string> names;
  if (const json* list = top.get("scenario")) {
    if (!list->is_array()) throw ValidationError("scenario: expected [[scenario]] entries");
    for (const auto& e : *list) {
      Table t(e, "scenario[" + std::to_string(cfg.scenarios.size()) + "]");
      ScenarioEntry s;
      s.name = t.as<std::string>(t.require("name"), "name");
      s.variant = variant_from_string(t.value<std::string>("variant", "with_reviews"));
      if (const json* h = t.get("history")) {
        s.train_history = s.test_history = t.as<std::string>(*h, "history");
      }
      if (const json* h = t.get("train_history")) s.train_history = t.as<std::string>(*h, "train_history");
      if (const json* h = t.get("test_history")) s.test_history = t.as<std::string>(*h, "test_history");
      if (const json* h = t.get("split_hash")) s.split_hash = t.as<std::string>(*h, "split_hash");
      if (const json* m = t.get("model")) {
        if (!m->is_object()) throw ValidationError(t.where() + ".model: expected a table");
        s.model_overrides = *m;
      }
      t.finish();
      const bool has_history = s.train_history || s.test_history;
      if (s.variant == ModelVariant::kIdsOnly && has_history) {
        throw ValidationError("scenario '" + s.name + "': ids_only takes no history sources");
      }
      if (s.variant == ModelVariant::kWithReviews && !(s.train_history && s.test_history)) {
        throw ValidationError("scenario '" + s.name + "': with_reviews needs history sources");
      }
      for (const auto* h : {&s.train_history, &s.test_history}) {
        if (*h) check_source(**h, "scenario '" + s.name + "'");
      }
      if (!names.insert(s.name).second) {
        throw ValidationError("scenario name '" + s.name + "' declared twice");
      }
      cfg.scenarios.push_back(std::move(s));
    }
  }

  if (const json* cross = top.get("cross")) {
    Table t(*cross, "cross");
    cfg.cross_sources = string_list(t, "sources");
    t.finish();
    for (const auto& s : cfg.cross_sources) check_source(s, "cross");
  }

  if (const json* list = top.get("comparison")) {
    if (!list->is_array()) throw ValidationError("comparison: expected [[comparison]] entries");
    for (const auto& e : *list) {
      Table t(e, "comparison");
      Comparison c{t.as<std::string>(t.require("baseline"), "baseline"),
                   t.as<std::string>(t.require("treatment"), "treatment")};
      t.finish();
      cfg.comparisons.push_back(std::move(c));
    }
  }

  if (const json* render = top.get("render")) {
    Table t(*render, "render");
    cfg.render_columns = string_list(t, "columns");
    t.finish();
  }

  if (const json* sweep = top.get("sweep")) {
    Table t(*sweep, "sweep");
    cfg.sweep_scenario = t.as<std::string>(t.require("scenario"), "scenario");
    cfg.sweep_grid.latent_dims = number_list<std::size_t>(t, "latent_dims", cfg.sweep_grid.latent_dims);
    cfg.sweep_grid.learning_rates =
        number_list<double>(t, "learning_rates", cfg.sweep_grid.learning_rates);
    cfg.sweep_grid.batch_sizes = number_list<std::size_t>(t, "batch_sizes", cfg.sweep_grid.batch_sizes);
    cfg.sweep_grid.reductions = number_list<double>(t, "reductions", cfg.sweep_grid.reductions);
    t.finish();
    if (!names.contains(*cfg.sweep_scenario)) {
      throw ValidationError("sweep.scenario '" + *cfg.sweep_scenario + "' is not declared");
    }
  }
  top.finish();
  return cfg;
}

Workspace load_workspace(const ExperimentConfig& cfg) {
  std::map<std::string, Corpus> raw;
  std::map<std::string, EmbeddingStore> stores;
  for (const auto& c : cfg.corpora) {
    raw.emplace(c.label, load_corpus(c.path, c.label));
    if (c.store) stores.emplace(c.label, open_store(*c.store));
  }
  return Workspace::build(std::move(raw), cfg.base_label, std::move(stores), cfg.protocol,
                          cfg.master_seed, cfg.model.history_length);
}

std::vector<ScenarioSpec> scenario_specs(const ExperimentConfig& cfg, const Workspace& ws) {
  std::vector<ScenarioSpec> out;
  for (const auto& e : cfg.scenarios) {
    ScenarioSpec s;
    s.name = e.name;
    s.variant = e.variant;
    s.train_history = e.train_history;
    s.test_history = e.test_history;
    s.model = apply_overrides(cfg.model, e.model_overrides, "scenario '" + e.name + "'.model");
    s.model.variant = e.variant;
    s.split_hash = e.split_hash.value_or(ws.data.split_hash);
    s.validate();
    out.push_back(std::move(s));
  }
  return out;
}

RunResult run_experiment(const ExperimentConfig& cfg) { return run_experiment(cfg, cfg.output_dir); }

RunResult run_experiment(const ExperimentConfig& cfg, const fs::path& out_dir) {
  using Clock = std::chrono::steady_clock;
  const auto started = Clock::now();
  json timing = json::object();
  auto seconds_since = [](Clock::time_point t) {
    return std::chrono::duration<double>(Clock::now() - t).count();
  };

  const Workspace ws = load_workspace(cfg);
  const auto specs = scenario_specs(cfg, ws);
  fs::create_directories(out_dir);

  std::map<std::string, std::string> outputs;  // relative path -> sha256
  auto emit = [&](const std::string& rel, const std::string& text) {
    write_text_file(out_dir / rel, text);
    outputs[rel] = sha256_hex(text);
  };

  json plan = to_json(ws.data.plan);
  emit("split_plan.json", pretty({{"split_hash", ws.data.split_hash},
                                  {"selection_digest", ws.data.selection_digest},
                                  {"plan", std::move(plan)}}));

  RunResult result;
  for (const auto& spec : specs) {
    const auto t0 = Clock::now();
    auto outcome = run_scenario(ws, spec);
    const std::string dir = "scenarios/" + spec.name + "/";
    emit(dir + "metrics.json", pretty(outcome.report));
    emit(dir + "loss_history.json", pretty(loss_history_json(spec.name, outcome.training)));
    emit(dir + "scenario.json", pretty(to_json(spec)));
    fs::create_directories(out_dir / dir);
    save_checkpoint(out_dir / (dir + "checkpoint.bin"), outcome.model);
    outputs[dir + "checkpoint.bin"] = sha256_file(out_dir / (dir + "checkpoint.bin"));
    result.reports.push_back(std::move(outcome.report));
    timing["scenarios"][spec.name] = seconds_since(t0);
  }

  if (!cfg.cross_sources.empty()) {
    const auto t0 = Clock::now();
    ModelConfig base = cfg.model;
    base.variant = ModelVariant::kWithReviews;
    auto matrix = run_cross_matrix(ws, cfg.cross_sources, base);
    emit("cross/matrix.json", pretty(to_json(matrix)));
    for (const auto& cell : matrix.cells) {
      emit("cross/" + cell.train_source + "_to_" + cell.test_source + ".metrics.json",
           pretty(cell.report));
      result.reports.push_back(cell.report);
    }
    for (const auto& [source, trained] : matrix.models) {
      const std::string rel = "cross/" + source + ".checkpoint.bin";
      save_checkpoint(out_dir / rel, trained.model);
      outputs[rel] = sha256_file(out_dir / rel);
    }
    timing["cross"] = seconds_since(t0);
  }

  if (!result.reports.empty()) {
    result.table = render_results_table(result.reports, cfg.comparisons, cfg.render_columns);
    emit("results.txt", result.table);
  }

  const fs::path config_dir = cfg.config_path.parent_path();
  json inputs = json::array();
  for (const auto& c : cfg.corpora) {
    json entry = {{"label", c.label},
                  {"corpus", {{"path", relative_name(c.path, config_dir)},
                              {"sha256", sha256_file(c.path)}}}};
    entry["store"] = c.store ? json{{"path", relative_name(*c.store, config_dir)},
                                    {"sha256", sha256_file(*c.store)}}
                             : json(nullptr);
    inputs.push_back(std::move(entry));
  }
  json manifest = {
      {"version", kSoftwareVersion},
      {"config", {{"file", cfg.config_path.filename().generic_string()},
                  {"sha256", cfg.config_sha256}}},
      {"master_seed", cfg.master_seed},
      {"seed_overridden", cfg.seed_overridden},
      {"protocol", to_json(cfg.protocol)},
      {"inputs", std::move(inputs)},
      {"split_hash", ws.data.split_hash},
      {"selection_digest", ws.data.selection_digest},
      {"outputs", outputs},
  };
  if (cfg.record_timing) {
    timing["total"] = seconds_since(started);
    manifest["timing"] = std::move(timing);
  }
  write_text_file(out_dir / "manifest.json", pretty(manifest));
  result.manifest = std::move(manifest);
  return result;
}

VerifyResult verify_manifest(const fs::path& manifest_path, const fs::path& config_path,
                             bool rerun) {
  if (!fs::exists(manifest_path)) {
    throw ValidationError("manifest not found: " + manifest_path.string());
  }
  json manifest;
  try {
    manifest = json::parse(read_text_file(manifest_path));
  } catch (const json::exception& e) {
    throw ValidationError("manifest is not valid JSON: " + std::string(e.what()));
  }
  VerifyResult v;
  auto diverge = [&](std::string what) {
    v.ok = false;
    v.divergences.push_back(std::move(what));
  };

  const std::string config_now = sha256_file(config_path);
  const std::string config_then = manifest.at("config").at("sha256").get<std::string>();
  if (config_now != config_then) {
    diverge("config hash: manifest " + config_then + ", now " + config_now);
  }
  const fs::path config_dir = config_path.parent_path();
  for (const auto& in : manifest.at("inputs")) {
    const std::string label = in.at("label").get<std::string>();
    for (const char* kind : {"corpus", "store"}) {
      const auto& f = in.at(kind);
      if (f.is_null()) continue;
      const fs::path p = resolve(config_dir, f.at("path").get<std::string>());
      if (!fs::exists(p)) throw ValidationError(std::string("missing input ") + kind + "[" + label + "]: " + p.string());
      const std::string now = sha256_file(p);
      if (now != f.at("sha256").get<std::string>()) {
        diverge(std::string(kind) + " digest [" + label + "] " + f.at("path").get<std::string>() +
                ": manifest " + f.at("sha256").get<std::string>() + ", now " + now);
      }
    }
  }
  const fs::path out_dir = manifest_path.parent_path();
  for (const auto& [rel, digest] : manifest.at("outputs").items()) {
    const fs::path p = out_dir / rel;
    if (!fs::exists(p)) {
      diverge("output missing: " + rel);
      continue;
    }
    if (sha256_file(p) != digest.get<std::string>()) diverge("output digest: " + rel);
  }

  if (rerun && v.ok) {
    const auto cfg =
        load_experiment_config(config_path, manifest.at("master_seed").get<std::uint64_t>());
    const fs::path scratch =
        fs::temp_directory_path() /
        ("revlab-verify-" + sha256_hex(manifest_path.string() + config_now).substr(0, 16));
    fs::remove_all(scratch);
    const auto again = run_experiment(cfg, scratch);
    for (const auto& [rel, digest] : manifest.at("outputs").items()) {
      auto it = again.manifest.at("outputs").find(rel);
      if (it == again.manifest.at("outputs").end()) {
        diverge("rerun did not produce " + rel);
      } else if (*it != digest) {
        diverge("rerun output digest: " + rel);
      }
    }
    if (!v.ok) v.reproducibility = true;
    fs::remove_all(scratch);
  }
  return v;
}

void write_text_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << text;
    if (!out) throw ValidationError("write failed: " + path.string());
  }
  fs::rename(tmp, path);
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace revlab
