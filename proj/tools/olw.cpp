// Command-line workbench: preprocess tweets, train/evaluate/predict
// classifier variants, run experiment grids, and render result tables.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "olw/checkpoint.hpp"
#include "olw/config.hpp"
#include "olw/dataset.hpp"
#include "olw/errors.hpp"
#include "olw/experiment.hpp"
#include "olw/harness.hpp"
#include "olw/metrics.hpp"
#include "olw/nn/adam.hpp"
#include "olw/nn/model.hpp"
#include "olw/preprocess.hpp"
#include "olw/representation.hpp"
#include "olw/results.hpp"

namespace {

using olw::Config;

// ---------------------------------------------------------------------------
// config section readers
// ---------------------------------------------------------------------------

const std::vector<std::string>& embedding_keys() {
  static const std::vector<std::string> keys{"twitter-100d", "twitter-200d",
                                             "commoncrawl-300d"};
  return keys;
}

void append_shared_keys(std::vector<std::string>& allowed) {
  for (const char* k :
       {"model.variant", "model.rnn_units", "model.conv_filters",
        "model.kernel_size", "model.pool_size", "model.dense_units",
        "model.spatial_dropout_rate", "model.rnn_dropout_rate",
        "model.embedding_dim", "model.embedding_trainable",
        "adam.learning_rate", "adam.beta1", "adam.beta2", "adam.epsilon",
        "data.max_len", "data.vocab_max_size", "data.min_freq", "data.resources",
        "embedding.key",
        "pipeline.remove_user_url", "pipeline.remove_tags_links",
        "pipeline.expand_contractions", "pipeline.correct_spelling",
        "pipeline.lemmatize", "pipeline.lowercase",
        "pipeline.max_edit_distance"}) {
    allowed.push_back(k);
  }
  for (const auto& k : embedding_keys()) allowed.push_back("embedding." + k);
}

olw::nn::ModelSpec model_from_config(const Config& cfg) {
  olw::nn::ModelSpec spec;
  spec.variant = olw::nn::variant_from_string(
      cfg.get_string("model.variant", "BiLSTM-CNN"));
  spec.rnn_units = static_cast<int>(cfg.get_int("model.rnn_units", spec.rnn_units));
  spec.conv_filters =
      static_cast<int>(cfg.get_int("model.conv_filters", spec.conv_filters));
  spec.kernel_size =
      static_cast<int>(cfg.get_int("model.kernel_size", spec.kernel_size));
  spec.pool_size = static_cast<int>(cfg.get_int("model.pool_size", spec.pool_size));
  spec.dense_units =
      static_cast<int>(cfg.get_int("model.dense_units", spec.dense_units));
  spec.spatial_dropout_rate =
      cfg.get_double("model.spatial_dropout_rate", spec.spatial_dropout_rate);
  spec.internal_rnn_dropout_rate =
      cfg.get_double("model.rnn_dropout_rate", spec.internal_rnn_dropout_rate);
  spec.embedding_dim =
      static_cast<int>(cfg.get_int("model.embedding_dim", spec.embedding_dim));
  spec.embedding_trainable =
      cfg.get_bool("model.embedding_trainable", spec.embedding_trainable);
  return spec;
}

olw::nn::AdamConfig adam_from_config(const Config& cfg) {
  olw::nn::AdamConfig adam;
  adam.learning_rate = cfg.get_double("adam.learning_rate", adam.learning_rate);
  adam.beta1 = cfg.get_double("adam.beta1", adam.beta1);
  adam.beta2 = cfg.get_double("adam.beta2", adam.beta2);
  adam.epsilon = cfg.get_double("adam.epsilon", adam.epsilon);
  return adam;
}

olw::PipelineConfig pipeline_from_config(const Config& cfg) {
  olw::PipelineConfig p;
  p.remove_user_url = cfg.get_bool("pipeline.remove_user_url", p.remove_user_url);
  p.remove_tags_links =
      cfg.get_bool("pipeline.remove_tags_links", p.remove_tags_links);
  p.expand_contractions =
      cfg.get_bool("pipeline.expand_contractions", p.expand_contractions);
  p.correct_spelling = cfg.get_bool("pipeline.correct_spelling", p.correct_spelling);
  p.lemmatize = cfg.get_bool("pipeline.lemmatize", p.lemmatize);
  p.lowercase = cfg.get_bool("pipeline.lowercase", p.lowercase);
  p.max_edit_distance = static_cast<int>(
      cfg.get_int("pipeline.max_edit_distance", p.max_edit_distance));
  return p;
}

std::map<std::string, std::string> embedding_files_from_config(const Config& cfg) {
  std::map<std::string, std::string> files;
  for (const auto& key : embedding_keys()) {
    if (cfg.has("embedding." + key)) {
      files[key] = cfg.get_string("embedding." + key);
    }
  }
  return files;
}

void fill_common(olw::ExperimentConfig& ecfg, const Config& cfg) {
  ecfg.model = model_from_config(cfg);
  ecfg.adam = adam_from_config(cfg);
  ecfg.pipeline = pipeline_from_config(cfg);
  ecfg.embedding_files = embedding_files_from_config(cfg);
  ecfg.default_embedding = cfg.get_string("embedding.key", "none");
  ecfg.max_len = static_cast<int>(cfg.get_int("data.max_len", ecfg.max_len));
  ecfg.vocab_max_size =
      static_cast<int>(cfg.get_int("data.vocab_max_size", ecfg.vocab_max_size));
  ecfg.vocab_min_freq =
      static_cast<int>(cfg.get_int("data.min_freq", ecfg.vocab_min_freq));
}

olw::PipelineResources resources_from_config(const Config& cfg,
                                             const olw::PipelineConfig& pipeline) {
  return olw::load_pipeline_resources(cfg.get_string("data.resources", "data"),
                                      pipeline.max_edit_distance);
}

// ---------------------------------------------------------------------------
// shared inference helpers
// ---------------------------------------------------------------------------

std::vector<int> predict_all(olw::nn::Model& model, const olw::EncodedSet& set) {
  std::vector<int> out;
  const int time = set.max_len;
  const int chunk = 256;
  for (int start = 0; start < set.size(); start += chunk) {
    const int b = std::min(chunk, set.size() - start);
    std::vector<int> tokens(
        set.tokens.begin() + static_cast<std::ptrdiff_t>(start) * time,
        set.tokens.begin() + static_cast<std::ptrdiff_t>(start + b) * time);
    std::vector<int> preds = model.predict(tokens, b, time);
    out.insert(out.end(), preds.begin(), preds.end());
  }
  return out;
}

olw::EncodedSet encode_texts(const std::vector<std::string>& texts,
                             const std::vector<int>& labels,
                             const olw::PipelineConfig& pipeline,
                             const olw::PipelineResources& resources,
                             const olw::Vocabulary& vocab, int max_len) {
  olw::EncodedSet set;
  set.max_len = max_len;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    auto tokens = olw::preprocess(texts[i], pipeline, resources);
    set.add(olw::encode(tokens, vocab, max_len), labels.empty() ? 0 : labels[i]);
  }
  return set;
}

void print_run_result(const olw::RunResult& r, std::ostream& out) {
  for (std::size_t f = 0; f < r.folds.size(); ++f) {
    out << "fold " << f << ": accuracy=" << r.folds[f].accuracy
        << " macro_f1=" << r.folds[f].macro_f1
        << " best_epoch=" << r.folds[f].best_epoch << "\n";
  }
  out << "mean accuracy = " << r.mean_accuracy << "\n";
  out << "mean macro_f1 = " << r.mean_macro_f1 << "\n";
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

int cmd_preprocess(const std::string& in_path, const std::string& out_path,
                   const std::string& resources_dir, int max_edit_distance) {
  auto records = olw::ingest_olid_tsv(in_path);
  olw::PipelineConfig pcfg;
  pcfg.max_edit_distance = max_edit_distance;
  auto resources = olw::load_pipeline_resources(resources_dir, max_edit_distance);
  std::ofstream out(out_path);
  if (!out) throw olw::data_error("cannot write output file: " + out_path);
  for (const auto& r : records) {
    auto tokens = olw::preprocess(r.text, pcfg, resources);
    out << r.id << "\t" << olw::join(tokens, " ") << "\n";
  }
  if (!out) throw olw::data_error("write failure on " + out_path);
  std::cout << "preprocessed " << records.size() << " records -> " << out_path
            << "\n";
  return 0;
}

int cmd_train(const std::string& config_path,
              const std::vector<std::string>& data_paths,
              const std::string& out_dir) {
  Config cfg = Config::from_file(config_path);
  std::vector<std::string> allowed{
      "train.subtask",   "train.mode",       "train.seed",
      "train.epochs",    "train.patience",   "train.batch_size",
      "train.balance",   "train.holdout_ratio", "train.inner_val_ratio",
      "train.k_folds",   "train.smote_k"};
  append_shared_keys(allowed);
  cfg.require_known(allowed);

  olw::ExperimentConfig ecfg;
  fill_common(ecfg, cfg);
  olw::Subtask subtask = olw::subtask_from_string(cfg.get_string("train.subtask", "a"));
  switch (subtask) {
    case olw::Subtask::a: ecfg.grid = olw::GridKind::subtask_a; break;
    case olw::Subtask::b: ecfg.grid = olw::GridKind::imbalance_b; break;
    case olw::Subtask::c: ecfg.grid = olw::GridKind::imbalance_c; break;
  }
  ecfg.master_seed = static_cast<std::uint64_t>(cfg.get_int("train.seed", 1));
  ecfg.epochs_cap = static_cast<int>(cfg.get_int("train.epochs", 30));
  ecfg.patience = static_cast<int>(cfg.get_int("train.patience", 10));
  ecfg.batch_size = static_cast<int>(cfg.get_int("train.batch_size", 64));
  ecfg.holdout_ratio = cfg.get_double("train.holdout_ratio", 0.2);
  ecfg.inner_val_ratio = cfg.get_double("train.inner_val_ratio", 0.1);
  ecfg.k_folds = static_cast<int>(cfg.get_int("train.k_folds", 5));
  ecfg.smote_k = static_cast<int>(cfg.get_int("train.smote_k", 5));

  std::string mode = cfg.get_string("train.mode", "holdout");
  if (mode != "holdout" && mode != "cv") {
    throw olw::config_error("train.mode must be holdout or cv, got '" + mode + "'");
  }

  std::vector<std::vector<olw::TweetRecord>> parts;
  for (const auto& p : data_paths) parts.push_back(olw::ingest_olid_tsv(p));
  auto records = olw::merge_datasets(parts);
  auto resources = resources_from_config(cfg, ecfg.pipeline);

  olw::GridRunner runner(ecfg, records, resources);
  olw::CellPlan plan;
  plan.cell_id = "train";
  plan.variant = ecfg.model.variant;
  plan.strategy =
      olw::balance_strategy_from_string(cfg.get_string("train.balance", "imbalanced"));
  plan.embedding_key = ecfg.default_embedding;

  std::unique_ptr<olw::nn::Model> model;
  olw::RunResult result = runner.train_cell(plan, mode == "cv", &model);
  print_run_result(result, std::cout);

  olw::CheckpointMeta meta;
  meta.spec = model->spec();
  meta.subtask = subtask;
  meta.class_names = olw::subtask_class_names(subtask);
  meta.max_len = ecfg.max_len;
  olw::save_checkpoint(out_dir, *model, runner.vocab(), meta);

  std::ofstream report_file(std::filesystem::path(out_dir) / "report.txt");
  if (!report_file) throw olw::data_error("cannot write report in " + out_dir);
  report_file << "variant = " << olw::nn::to_string(plan.variant) << "\n";
  report_file << "mode = " << mode << "\n";
  print_run_result(result, report_file);
  std::cout << "checkpoint written to " << out_dir << "\n";
  return 0;
}

int cmd_evaluate(const std::string& ckpt_dir, const std::string& data_path,
                 const std::string& resources_dir, const std::string& json_out) {
  olw::LoadedCheckpoint ckpt = olw::load_checkpoint(ckpt_dir);
  auto records = olw::ingest_olid_tsv(data_path);
  auto rows = olw::select_for_subtask(records, ckpt.meta.subtask);
  if (rows.empty()) {
    throw olw::data_error("no records carry a label for subtask " +
                          olw::to_string(ckpt.meta.subtask));
  }
  olw::PipelineConfig pcfg;
  auto resources = olw::load_pipeline_resources(resources_dir, pcfg.max_edit_distance);
  std::vector<std::string> texts;
  std::vector<int> labels;
  for (const auto& r : rows) {
    texts.push_back(r.text);
    labels.push_back(r.label);
  }
  olw::EncodedSet set =
      encode_texts(texts, labels, pcfg, resources, ckpt.vocab, ckpt.meta.max_len);
  std::vector<int> preds = predict_all(ckpt.model, set);
  olw::EvaluationReport rep =
      olw::report(labels, preds, ckpt.meta.spec.num_classes);
  std::cout << olw::to_key_values(rep, ckpt.meta.class_names);

  if (!json_out.empty()) {
    nlohmann::json j;
    j["accuracy"] = rep.accuracy;
    j["macro_f1"] = rep.macro_f1;
    j["per_class"] = nlohmann::json::array();
    for (std::size_t c = 0; c < rep.per_class.size(); ++c) {
      j["per_class"].push_back({{"name", ckpt.meta.class_names[c]},
                                {"precision", rep.per_class[c].precision},
                                {"recall", rep.per_class[c].recall},
                                {"f1", rep.per_class[c].f1}});
    }
    j["confusion"] = nlohmann::json::array();
    for (int t = 0; t < rep.confusion.num_classes; ++t) {
      nlohmann::json row = nlohmann::json::array();
      for (int p = 0; p < rep.confusion.num_classes; ++p) {
        row.push_back(rep.confusion.at(t, p));
      }
      j["confusion"].push_back(row);
    }
    std::ofstream out(json_out);
    if (!out) throw olw::data_error("cannot write " + json_out);
    out << j.dump(2) << "\n";
  }
  return 0;
}

int cmd_predict(const std::string& ckpt_dir, const std::string& in_path,
                const std::string& out_path, const std::string& resources_dir) {
  olw::LoadedCheckpoint ckpt = olw::load_checkpoint(ckpt_dir);
  auto records = olw::ingest_olid_tsv(in_path);
  olw::PipelineConfig pcfg;
  auto resources = olw::load_pipeline_resources(resources_dir, pcfg.max_edit_distance);
  std::vector<std::string> texts;
  for (const auto& r : records) texts.push_back(r.text);
  olw::EncodedSet set =
      encode_texts(texts, {}, pcfg, resources, ckpt.vocab, ckpt.meta.max_len);
  std::vector<int> preds = predict_all(ckpt.model, set);
  std::ofstream out(out_path);
  if (!out) throw olw::data_error("cannot write output file: " + out_path);
  out << "id,label\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    out << records[i].id << ","
        << ckpt.meta.class_names[static_cast<std::size_t>(preds[i])] << "\n";
  }
  if (!out) throw olw::data_error("write failure on " + out_path);
  std::cout << "wrote " << records.size() << " predictions -> " << out_path << "\n";
  return 0;
}

int cmd_experiment(const std::string& config_path, const std::string& results_dir) {
  Config cfg = Config::from_file(config_path);
  std::vector<std::string> allowed{
      "experiment.grid",          "experiment.seed",
      "experiment.k_folds",       "experiment.holdout_ratio",
      "experiment.inner_val_ratio", "experiment.epochs",
      "experiment.patience",      "experiment.batch_size",
      "experiment.smote_k",       "data.train", "data.trial"};
  append_shared_keys(allowed);
  cfg.require_known(allowed);

  olw::ExperimentConfig ecfg;
  fill_common(ecfg, cfg);
  ecfg.grid = olw::grid_kind_from_string(cfg.get_string("experiment.grid"));
  ecfg.master_seed = static_cast<std::uint64_t>(cfg.get_int("experiment.seed", 1));
  ecfg.k_folds = static_cast<int>(cfg.get_int("experiment.k_folds", 5));
  ecfg.holdout_ratio = cfg.get_double("experiment.holdout_ratio", 0.2);
  ecfg.inner_val_ratio = cfg.get_double("experiment.inner_val_ratio", 0.1);
  ecfg.epochs_cap = static_cast<int>(cfg.get_int("experiment.epochs", 30));
  ecfg.patience = static_cast<int>(cfg.get_int("experiment.patience", 10));
  ecfg.batch_size = static_cast<int>(cfg.get_int("experiment.batch_size", 64));
  ecfg.smote_k = static_cast<int>(cfg.get_int("experiment.smote_k", 5));

  std::vector<std::vector<olw::TweetRecord>> parts;
  parts.push_back(olw::ingest_olid_tsv(cfg.get_string("data.train")));
  if (cfg.has("data.trial")) {
    parts.push_back(olw::ingest_olid_tsv(cfg.get_string("data.trial")));
  }
  auto records = olw::merge_datasets(parts);
  auto resources = resources_from_config(cfg, ecfg.pipeline);

  olw::ResultsStore store = olw::ResultsStore::open(results_dir);
  olw::GridRunner runner(ecfg, records, resources);
  olw::GridReport report = runner.run(store);
  for (const auto& cell : report.cells) {
    if (cell.ok) {
      std::printf("%-40s ok    mean_f1=%.4f  (%.1fs)\n", cell.cell_id.c_str(),
                  cell.result.mean_macro_f1, cell.result.wall_seconds);
    } else {
      std::printf("%-40s FAILED %s\n", cell.cell_id.c_str(), cell.message.c_str());
    }
  }
  std::cout << "results stored in " << results_dir << "\n";
  return 0;
}

int cmd_report(const std::string& results_dir, int table, const std::string& format,
               const std::string& out_path) {
  olw::ResultsStore store = olw::ResultsStore::open(results_dir);
  std::string text = olw::render_table(store, table, format);
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    if (!out) throw olw::data_error("cannot write " + out_path);
    out << text;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"offensive-language classification workbench"};
  app.require_subcommand(1);

  // preprocess
  auto* pre = app.add_subcommand("preprocess", "run the text pipeline over a TSV");
  std::string pre_in, pre_out, pre_resources = "data";
  int pre_edit = 3;
  pre->add_option("--in", pre_in, "input TSV")->required();
  pre->add_option("--out", pre_out, "output id<TAB>tokens file")->required();
  pre->add_option("--resources", pre_resources,
                  "directory with contractions.tsv, lemmas.tsv, wordfreq.txt");
  pre->add_option("--max-edit-distance", pre_edit, "spell correction bound");

  // train
  auto* train = app.add_subcommand("train", "train one model configuration");
  std::string train_config, train_out;
  std::vector<std::string> train_data;
  train->add_option("--config", train_config, "experiment config file")->required();
  train->add_option("--data", train_data, "dataset TSV (repeat to combine)")
      ->required();
  train->add_option("--out", train_out, "checkpoint output directory")->required();

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "evaluate a checkpoint on a TSV");
  std::string eval_ckpt, eval_data, eval_resources = "data", eval_json;
  eval->add_option("--ckpt", eval_ckpt, "checkpoint directory")->required();
  eval->add_option("--data", eval_data, "dataset TSV")->required();
  eval->add_option("--resources", eval_resources, "preprocessing resources dir");
  eval->add_option("--json", eval_json, "also write the report as JSON");

  // predict
  auto* pred = app.add_subcommand("predict", "label a TSV with a checkpoint");
  std::string pred_ckpt, pred_in, pred_out, pred_resources = "data";
  pred->add_option("--ckpt", pred_ckpt, "checkpoint directory")->required();
  pred->add_option("--in", pred_in, "input TSV")->required();
  pred->add_option("--out", pred_out, "output CSV (id,label)")->required();
  pred->add_option("--resources", pred_resources, "preprocessing resources dir");

  // experiment
  auto* exp = app.add_subcommand("experiment", "run a full experiment grid");
  std::string exp_config, exp_results;
  exp->add_option("--config", exp_config, "grid config file")->required();
  exp->add_option("--results", exp_results, "results store directory")->required();

  // report
  auto* rep = app.add_subcommand("report", "render a results table");
  std::string rep_results, rep_format = "md", rep_out;
  int rep_table = 2;
  rep->add_option("--results", rep_results, "results store directory")->required();
  rep->add_option("--table", rep_table, "table number (2-7)")->required();
  rep->add_option("--format", rep_format, "md or csv");
  rep->add_option("--out", rep_out, "write to file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (pre->parsed()) return cmd_preprocess(pre_in, pre_out, pre_resources, pre_edit);
    if (train->parsed()) return cmd_train(train_config, train_data, train_out);
    if (eval->parsed()) return cmd_evaluate(eval_ckpt, eval_data, eval_resources, eval_json);
    if (pred->parsed()) return cmd_predict(pred_ckpt, pred_in, pred_out, pred_resources);
    if (exp->parsed()) return cmd_experiment(exp_config, exp_results);
    if (rep->parsed()) return cmd_report(rep_results, rep_table, rep_format, rep_out);
  } catch (const olw::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const olw::data_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const olw::numeric_error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
