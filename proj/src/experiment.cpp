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


#include "revlab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <unordered_set>

#include "revlab/digest.hpp"
#include "revlab/error.hpp"

namespace revlab {
namespace {

using nlohmann::json;

const std::vector<std::string> kDefaultColumns = {
    "rmse",     "mae",           "mrr@10",         "ndcg@10",
    "stars@10", "popularity@10", "helpfulness@10", "regional_spread@10"};

void append_ids(std::ostringstream& out, const std::vector<ReviewId>& ids) {
  out << '[';
  for (ReviewId id : ids) out << id << ',';
  out << ']';
}

void append_instances(std::ostringstream& out, const std::vector<Instance>& set) {
  for (const auto& inst : set) {
    out << inst.user_index << ' ' << inst.item_index << ' ';
    append_ids(out, inst.user_history);
    append_ids(out, inst.item_history);
    out << '\n';
  }
}

json metric_entry(std::span<const double> values, double aggregate) {
  return {{"value", aggregate},
          {"n", values.size()},
          {"per_instance_digest", sha256_hex(values)}};
}

std::vector<double> per_instance(const json& report, const std::string& metric) {
  try {
    return report.at("per_instance").at(metric).get<std::vector<double>>();
  } catch (const json::exception&) {
    throw ValidationError("report '" + report.value("scenario", std::string("?")) +
                          "' has no per-instance values for " + metric);
  }
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace

json to_json(const ProtocolConfig& p) {
  return {{"min_interactions", p.min_interactions},
          {"filter_mode", p.filter_mode == FilterMode::kFixpoint ? "fixpoint" : "single_pass"},
          {"validation_fraction", p.validation_fraction},
          {"negatives", p.negatives},
          {"short_history", p.short_history == ShortHistoryPolicy::kPad ? "pad" : "drop"},
          {"ranking_cutoffs", p.ranking_cutoffs},
          {"business_k", p.business_k},
          {"popularity_rank", p.popularity_rank}};
}

PreparedData prepare_data(const Corpus& filtered, std::uint64_t master_seed,
                          const ProtocolConfig& protocol, std::size_t history_length) {
  if (history_length == 0) throw ValidationError("history length must be positive");
  PreparedData d;
  d.plan = sample_negatives(
      carve_validation(leave_one_out_split(filtered, master_seed), protocol.validation_fraction),
      filtered, protocol.negatives);
  if (d.plan.users.empty()) throw ValidationError("no user has two or more reviews");
  d.split_hash = plan_digest(d.plan);

  std::unordered_set<ReviewId> train_ids, validation_ids;
  std::set<std::string> users, items;
  for (const auto& u : d.plan.users) {
    for (ReviewId id : u.train) {
      train_ids.insert(id);
      users.insert(u.user_id);
      items.insert(filtered.find(id)->item_id);
    }
    validation_ids.insert(u.validation.begin(), u.validation.end());
  }
  d.users = IdVocabulary(std::vector<std::string>(users.begin(), users.end()));
  d.items = IdVocabulary(std::vector<std::string>(items.begin(), items.end()));

  auto in_train = [&](const ReviewRecord& r) { return train_ids.contains(r.review_id); };
  auto before_test = [&](const ReviewRecord& r) {
    return train_ids.contains(r.review_id) || validation_ids.contains(r.review_id);
  };
  // Training and validation events see train-split reviews only; test and
  // candidate events also see validation reviews. Test reviews never appear.
  const HistoryIndex train_users(filtered, Side::kUser, in_train);
  const HistoryIndex train_items(filtered, Side::kItem, in_train);
  const HistoryIndex eval_users(filtered, Side::kUser, before_test);
  const HistoryIndex eval_items(filtered, Side::kItem, before_test);
  const std::size_t k = history_length;

  auto make = [&](const ReviewRecord& r, const HistoryIndex& ui, const HistoryIndex& ii) {
    Instance inst;
    inst.user_index = d.users.index_of(r.user_id);
    inst.item_index = d.items.index_of(r.item_id);
    inst.rating = r.overall_rating;
    inst.user_history = ui.select(r.user_id, event_key(r), k);
    inst.item_history = ii.select(r.item_id, event_key(r), k);
    return inst;
  };
  auto keep = [&](const Instance& inst) {
    return protocol.short_history == ShortHistoryPolicy::kPad ||
           (inst.user_history.size() == k && inst.item_history.size() == k);
  };

  for (const auto& u : d.plan.users) {
    for (ReviewId id : u.train) {
      Instance inst = make(*filtered.find(id), train_users, train_items);
      if (keep(inst)) d.train.push_back(std::move(inst));
    }
    for (ReviewId id : u.validation) {
      Instance inst = make(*filtered.find(id), train_users, train_items);
      if (keep(inst)) d.validation.push_back(std::move(inst));
    }
    d.test.push_back(make(*filtered.find(u.test), eval_users, eval_items));
  }
  if (d.train.empty()) throw ValidationError("no training instances after history policy");

  d.ranking = build_ranking_testset(d.plan, filtered);
  for (const auto& rc : d.ranking) {
    const ReviewRecord& test = *filtered.find(rc.test_review);
    std::vector<Instance> cands;
    cands.reserve(rc.candidate_count());
    cands.push_back(make(test, eval_users, eval_items));
    for (const auto& item : rc.negatives) {
      Instance inst = cands.front();
      inst.item_index = d.items.index_of(item);
      inst.item_history = eval_items.select(item, event_key(test), k);
      inst.rating = 0.0;
      cands.push_back(std::move(inst));
    }
    d.candidates.push_back(std::move(cands));
  }

  d.catalog = ItemCatalog::build(filtered, before_test);

  std::ostringstream sel;
  append_instances(sel, d.train);
  sel << "--\n";
  append_instances(sel, d.validation);
  sel << "--\n";
  append_instances(sel, d.test);
  for (const auto& c : d.candidates) {
    sel << "--\n";
    append_instances(sel, c);
  }
  d.selection_digest = sha256_hex(sel.str());
  return d;
}

EvaluationReport evaluate(const TrainedModel& model, const PreparedData& data,
                          const EmbeddingStore* store, const ProtocolConfig& protocol) {
  EvaluationReport e;
  std::vector<double> preds, targets;
  preds.reserve(data.test.size());
  for (const auto& inst : data.test) {
    preds.push_back(predict_clamped(model, inst, store));
    targets.push_back(inst.rating);
  }
  e.rating = rating_metrics(preds, targets);

  if (data.ranking.empty()) return e;
  std::vector<RankedList> lists;
  lists.reserve(data.ranking.size());
  for (std::size_t c = 0; c < data.ranking.size(); ++c) {
    const auto& rc = data.ranking[c];
    std::vector<std::string> items{rc.positive_item};
    items.insert(items.end(), rc.negatives.begin(), rc.negatives.end());
    std::vector<double> scores;
    scores.reserve(items.size());
    // Raw scores: clamping would manufacture ties at the scale ends.
    for (const auto& inst : data.candidates[c]) {
      scores.push_back(predict_raw(model.params, model.config, inst, store));
    }
    lists.push_back(rank_candidates(rc.user_id, items, scores, rc.positive_item));
  }
  for (std::size_t k : protocol.ranking_cutoffs) e.ranking.push_back(ranking_metrics(lists, k));
  std::vector<std::vector<std::string>> tops;
  tops.reserve(lists.size());
  for (auto& l : lists) tops.push_back(std::move(l.candidates));
  e.business = business_metrics(tops, data.catalog, protocol.business_k, protocol.popularity_rank);
  return e;
}

json metrics_report(const std::string& scenario, const std::string& split_hash,
                    const EvaluationReport& eval) {
  json metrics = json::object();
  json values = json::object();
  auto add = [&](const std::string& name, const std::vector<double>& v, double agg) {
    metrics[name] = metric_entry(v, agg);
    values[name] = v;
  };
  add("rmse", eval.rating.squared_errors, eval.rating.rmse);
  add("mae", eval.rating.absolute_errors, eval.rating.mae);
  for (const auto& r : eval.ranking) {
    add("mrr@" + std::to_string(r.k), r.per_list_rr, r.mrr);
    add("ndcg@" + std::to_string(r.k), r.per_list_ndcg, r.ndcg);
  }
  if (eval.business) {
    const auto& b = *eval.business;
    const std::string k = "@" + std::to_string(b.k);
    add("stars" + k, b.per_user_stars, b.avg_stars);
    add("popularity" + k, b.per_user_popularity, b.avg_popularity);
    add("helpfulness" + k, b.per_user_helpfulness, b.avg_helpfulness);
    add("regional_spread" + k, b.per_user_regional_spread, b.avg_regional_spread);
    if (b.avg_popularity_rank) {
      add("popularity_rank" + k, b.per_user_popularity_rank, *b.avg_popularity_rank);
    }
  }
  return {{"scenario", scenario},
          {"split_hash", split_hash},
          {"metrics", std::move(metrics)},
          {"per_instance", std::move(values)}};
}

void ScenarioSpec::validate() const {
  if (name.empty()) throw ValidationError("scenario needs a name");
  if (variant == ModelVariant::kIdsOnly) {
    if (train_history || test_history) {
      throw ValidationError("scenario '" + name + "': ids_only takes no history sources");
    }
  } else if (!train_history || !test_history) {
    throw ValidationError("scenario '" + name + "': with_reviews needs train and test sources");
  }
  ModelConfig cfg = model;
  cfg.variant = variant;
  cfg.validate();
}

json to_json(const ScenarioSpec& s) {
  ModelConfig cfg = s.model;
  cfg.variant = s.variant;
  return {{"name", s.name},
          {"variant", to_string(s.variant)},
          {"train_history", s.train_history ? json(*s.train_history) : json(nullptr)},
          {"test_history", s.test_history ? json(*s.test_history) : json(nullptr)},
          {"model", to_json(cfg)},
          {"split_hash", s.split_hash}};
}

Workspace Workspace::build(std::map<std::string, Corpus> raw, std::string base_label,
                           std::map<std::string, EmbeddingStore> stores,
                           const ProtocolConfig& protocol, std::uint64_t master_seed,
                           std::size_t history_length) {
  auto base = raw.find(base_label);
  if (base == raw.end()) throw ValidationError("base corpus '" + base_label + "' not loaded");
  for (const auto& [label, c] : raw) {
    if (label != base_label) align_corpora(base->second, c);
  }
  Workspace ws;
  ws.base_label = std::move(base_label);
  ws.protocol = protocol;
  ws.master_seed = master_seed;
  ws.history_length = history_length;
  for (auto& [label, c] : raw) {
    ws.corpora.emplace(label,
                       filter_min_interactions(c, protocol.min_interactions, protocol.filter_mode));
  }
  for (const auto& [label, s] : stores) {
    if (!ws.corpora.contains(label)) {
      throw ValidationError("embedding store given for unknown corpus '" + label + "'");
    }
  }
  ws.stores = std::move(stores);
  ws.data = prepare_data(ws.corpora.at(ws.base_label), master_seed, protocol, history_length);
  return ws;
}

const EmbeddingStore* Workspace::store_for(const std::optional<std::string>& label) const {
  if (!label) return nullptr;
  auto it = stores.find(*label);
  if (it == stores.end()) throw ValidationError("no embedding store for corpus '" + *label + "'");
  return &it->second;
}

TrainedScenario train_scenario(const Workspace& ws, const ScenarioSpec& spec) {
  spec.validate();
  ModelConfig cfg = spec.model;
  cfg.variant = spec.variant;
  if (cfg.history_length != ws.history_length) {
    throw ValidationError("scenario '" + spec.name + "': history length " +
                          std::to_string(cfg.history_length) + " differs from workspace " +
                          std::to_string(ws.history_length));
  }
  TrainedScenario out;
  out.training = train(cfg, ws.data.users.size(), ws.data.items.size(), ws.data.train,
                       ws.data.validation, ws.store_for(spec.train_history));
  out.model = {cfg, ws.data.users, ws.data.items, out.training.params};
  return out;
}

ScenarioOutcome run_scenario(const Workspace& ws, const ScenarioSpec& spec) {
  if (spec.split_hash.empty()) {
    throw ValidationError("scenario '" + spec.name + "' declares no split hash");
  }
  if (spec.split_hash != ws.data.split_hash) {
    throw ReproducibilityError("scenario '" + spec.name + "': declared split hash " +
                               spec.split_hash + " does not match workspace split " +
                               ws.data.split_hash);
  }
  TrainedScenario t = train_scenario(ws, spec);
  ScenarioOutcome o;
  o.spec = spec;
  o.evaluation = evaluate(t.model, ws.data, ws.store_for(spec.test_history), ws.protocol);
  o.report = metrics_report(spec.name, ws.data.split_hash, o.evaluation);
  o.training = std::move(t.training);
  o.model = std::move(t.model);
  return o;
}

const CrossCell& CrossMatrix::cell(const std::string& train, const std::string& test) const {
  for (const auto& c : cells) {
    if (c.train_source == train && c.test_source == test) return c;
  }
  throw ValidationError("no cross cell " + train + " -> " + test);
}

std::string parameter_digest(const ModelParameters& p) { return sha256_hex(p.values); }

CrossMatrix run_cross_matrix(const Workspace& ws, const std::vector<std::string>& sources,
                             const ModelConfig& base_config) {
  if (sources.empty()) throw ValidationError("cross matrix needs at least one source");
  for (const auto& s : sources) {
    auto it = ws.corpora.find(s);
    if (it == ws.corpora.end()) throw ValidationError("cross source '" + s + "' not loaded");
    ws.store_for(s);
    const PreparedData own =
        prepare_data(it->second, ws.master_seed, ws.protocol, ws.history_length);
    if (own.split_hash != ws.data.split_hash) {
      throw ReproducibilityError("cross source '" + s + "': split hash " + own.split_hash +
                                 " differs from base split " + ws.data.split_hash);
    }
    if (own.selection_digest != ws.data.selection_digest) {
      throw ReproducibilityError("cross source '" + s + "': history selection digest " +
                                 own.selection_digest + " differs from base " +
                                 ws.data.selection_digest);
    }
  }
  CrossMatrix m;
  m.sources = sources;
  for (const auto& train_source : sources) {
    ScenarioSpec spec;
    spec.name = train_source;
    spec.variant = ModelVariant::kWithReviews;
    spec.train_history = train_source;
    spec.test_history = train_source;
    spec.model = base_config;
    spec.split_hash = ws.data.split_hash;
    m.models.emplace(train_source, train_scenario(ws, spec));
  }
  for (const auto& train_source : sources) {
    const TrainedScenario& t = m.models.at(train_source);
    for (const auto& test_source : sources) {
      CrossCell c;
      c.train_source = train_source;
      c.test_source = test_source;
      c.checkpoint_digest = parameter_digest(t.model.params);
      c.evaluation = evaluate(t.model, ws.data, ws.store_for(test_source), ws.protocol);
      c.report = metrics_report(train_source + "->" + test_source, ws.data.split_hash,
                                c.evaluation);
      m.cells.push_back(std::move(c));
    }
  }
  return m;
}

json to_json(const CrossMatrix& m) {
  json cells = json::array();
  for (const auto& c : m.cells) {
    cells.push_back({{"train", c.train_source},
                     {"test", c.test_source},
                     {"checkpoint_digest", c.checkpoint_digest},
                     {"rmse", c.evaluation.rating.rmse},
                     {"mae", c.evaluation.rating.mae},
                     {"report_digest", sha256_hex(c.report.dump())}});
  }
  json models = json::object();
  for (const auto& [source, t] : m.models) {
    models[source] = {{"parameter_digest", parameter_digest(t.model.params)},
                      {"final_train_loss", t.training.history.back().train_loss}};
  }
  return {{"sources", m.sources}, {"cells", std::move(cells)}, {"models", std::move(models)}};
}

MetricDirection metric_direction(const std::string& metric) {
  if (metric == "rmse" || metric == "mae" || metric.starts_with("popularity_rank")) {
    return MetricDirection::kLowerIsBetter;
  }
  return MetricDirection::kHigherIsBetter;
}

SignificanceResult compare_reports(const json& baseline, const json& treatment,
                                   const std::string& metric) {
  const auto a = per_instance(treatment, metric);
  const auto b = per_instance(baseline, metric);
  if (a.size() != b.size()) {
    throw ValidationError("per-instance vectors for " + metric + " differ in length (" +
                          std::to_string(b.size()) + " vs " + std::to_string(a.size()) + ")");
  }
  return paired_t_test(a, b);
}

std::string render_results_table(const std::vector<json>& reports,
                                 const std::vector<Comparison>& comparisons,
                                 const std::vector<std::string>& columns, TableFormat format) {
  if (reports.empty()) throw ValidationError("render: no reports");
  std::map<std::string, const json*> by_name;
  const std::string split = reports.front().at("split_hash").get<std::string>();
  for (const auto& r : reports) {
    const std::string name = r.at("scenario").get<std::string>();
    if (r.at("split_hash").get<std::string>() != split) {
      throw ValidationError("render: report '" + name + "' has split hash " +
                            r.at("split_hash").get<std::string>() + ", expected " + split);
    }
    if (!by_name.emplace(name, &r).second) {
      throw ValidationError("render: duplicate report '" + name + "'");
    }
  }
  std::vector<std::string> cols;
  if (columns.empty()) {
    for (const auto& c : kDefaultColumns) {
      if (reports.front().at("metrics").contains(c)) cols.push_back(c);
    }
  } else {
    cols = columns;
  }
  for (const auto& r : reports) {
    for (const auto& c : cols) {
      if (!r.at("metrics").contains(c)) {
        throw ValidationError("render: report '" + r.at("scenario").get<std::string>() +
                              "' lacks metric " + c);
      }
    }
  }

  std::map<std::pair<std::string, std::string>, std::string> stars;
  std::vector<std::string> notes;
  for (const auto& cmp : comparisons) {
    for (const auto* n : {&cmp.baseline, &cmp.treatment}) {
      if (!by_name.contains(*n)) throw ValidationError("render: unknown report '" + *n + "'");
    }
    const json& base = *by_name.at(cmp.baseline);
    const json& treat = *by_name.at(cmp.treatment);
    for (const auto& c : cols) {
      const double bv = base.at("metrics").at(c).at("value").get<double>();
      const double tv = treat.at("metrics").at(c).at("value").get<double>();
      std::string line = cmp.treatment + " vs " + cmp.baseline + ", " + c + ": " +
                         format_value(bv) + " -> " + format_value(tv) + ", ";
      line += bv == 0.0 ? std::string("change undefined (zero baseline)")
                        : "a " + render_percent_change(bv, tv, metric_direction(c));
      if (per_instance(base, c).size() >= 2) {
        const SignificanceResult s = compare_reports(base, treat, c);
        stars.emplace(std::pair{cmp.treatment, c}, s.stars);
        char buf[64];
        std::snprintf(buf, sizeof(buf), " (p = %.4g%s%s)", s.p_value, s.stars.empty() ? "" : ", ",
                      s.stars.c_str());
        line += buf;
      }
      notes.push_back(std::move(line));
    }
  }

  std::vector<std::vector<std::string>> rows;
  rows.push_back({"model"});
  rows.back().insert(rows.back().end(), cols.begin(), cols.end());
  for (const auto& r : reports) {
    const std::string name = r.at("scenario").get<std::string>();
    std::vector<std::string> row{name};
    for (const auto& c : cols) {
      std::string cell = format_value(r.at("metrics").at(c).at("value").get<double>());
      if (auto it = stars.find({name, c}); it != stars.end()) cell += it->second;
      row.push_back(std::move(cell));
    }
    rows.push_back(std::move(row));
  }

  std::ostringstream out;
  if (format == TableFormat::kCsv) {
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
      out << '\n';
    }
    return out.str();
  }
  std::vector<std::size_t> width(rows.front().size(), 0);
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << row[i];
      if (i + 1 < row.size()) out << std::string(width[i] - row[i].size() + 2, ' ');
    }
    out << '\n';
  }
  if (!notes.empty()) {
    out << '\n';
    for (const auto& n : notes) out << n << '\n';
    out << "\n* p <= 0.1, ** p <= 0.05, *** p <= 0.001 (paired t-test)\n";
  }
  return out.str();
}

std::vector<SweepPoint> run_sweep(const Workspace& ws, const ScenarioSpec& spec,
                                  const SweepGrid& grid) {
  std::vector<SweepPoint> points;
  for (std::size_t latent : grid.latent_dims) {
    for (double lr : grid.learning_rates) {
      for (std::size_t batch : grid.batch_sizes) {
        for (double rho : grid.reductions) {
          ScenarioSpec s = spec;
          s.model.latent_dim = latent;
          if (!s.model.learn_layer_sizes.empty()) s.model.learn_layer_sizes.back() = latent;
          s.model.learning_rate = lr;
          s.model.batch_size = batch;
          s.model.reduction = rho;
          TrainedScenario t = train_scenario(ws, s);
          points.push_back({t.model.config, t.training.history.back().train_loss,
                            t.training.history.back().validation_loss});
        }
      }
    }
  }
  return points;
}

json to_json(const std::vector<SweepPoint>& points) {
  json out = json::array();
  std::size_t best = points.size();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double v = points[i].final_validation_loss;
    if (!std::isnan(v) && (best == points.size() || v < points[best].final_validation_loss)) {
      best = i;
    }
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    json vl = std::isnan(p.final_validation_loss) ? json(nullptr) : json(p.final_validation_loss);
    out.push_back({{"latent_dim", p.config.latent_dim},
                   {"learning_rate", p.config.learning_rate},
                   {"batch_size", p.config.batch_size},
                   {"reduction", p.config.reduction},
                   {"final_train_loss", p.final_train_loss},
                   {"final_validation_loss", std::move(vl)},
                   {"best", i == best}});
  }
  return out;
}

}  // namespace revlab
