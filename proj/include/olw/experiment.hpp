#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "olw/balance.hpp"
#include "olw/dataset.hpp"
#include "olw/errors.hpp"
#include "olw/harness.hpp"
#include "olw/metrics.hpp"
#include "olw/nn/adam.hpp"
#include "olw/nn/model.hpp"
#include "olw/nn/variant.hpp"
#include "olw/preprocess.hpp"
#include "olw/representation.hpp"
#include "olw/results.hpp"
#include "olw/rng.hpp"

namespace olw {

// ---------------------------------------------------------------------------
// minibatch trainer (plugs into harness fit_* templates)
// ---------------------------------------------------------------------------

// Token sequences already encoded and padded, flattened row-major.
struct EncodedSet {
  std::vector<int> tokens;
  std::vector<int> labels;
  int max_len = 0;

  int size() const { return static_cast<int>(labels.size()); }

  void add(const std::vector<int>& sequence, int label) {
    if (max_len == 0) max_len = static_cast<int>(sequence.size());
    tokens.insert(tokens.end(), sequence.begin(), sequence.end());
    labels.push_back(label);
  }
};

class MinibatchTrainer {
 public:
  MinibatchTrainer(nn::Model& model, const EncodedSet& train,
                   const EncodedSet& validation,
                   std::vector<double> class_weights, int batch_size,
                   std::uint64_t shuffle_seed, std::uint64_t dropout_seed,
                   nn::AdamConfig adam_config = {})
      : model_(model), train_(train), validation_(validation),
        class_weights_(std::move(class_weights)), batch_size_(batch_size),
        adam_(model.params(), adam_config), shuffle_rng_(shuffle_seed),
        dropout_rng_(dropout_seed) {
    if (batch_size_ < 1) throw config_error("batch_size must be at least 1");
    order_.resize(static_cast<std::size_t>(train_.size()));
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
  }

  void run_epoch(int epoch) {
    shuffle_rng_.shuffle(order_);
    const int n = train_.size();
    const int time = train_.max_len;
    for (int start = 0; start < n; start += batch_size_) {
      const int b = std::min(batch_size_, n - start);
      std::vector<int> tokens(static_cast<std::size_t>(b) * time);
      std::vector<int> labels(static_cast<std::size_t>(b));
      for (int i = 0; i < b; ++i) {
        std::size_t row = order_[static_cast<std::size_t>(start + i)];
        std::copy_n(train_.tokens.begin() + static_cast<std::ptrdiff_t>(row) * time,
                    time, tokens.begin() + static_cast<std::ptrdiff_t>(i) * time);
        labels[static_cast<std::size_t>(i)] = train_.labels[row];
      }
      try {
        last_loss_ = nn::train_step(model_, adam_, tokens, b, time, labels,
                                    class_weights_, dropout_rng_);
      } catch (const numeric_error& e) {
        throw numeric_error(std::string(e.what()) + " (epoch " +
                            std::to_string(epoch) + ")");
      }
    }
  }

  double validation_score() {
    EvaluationReport rep = evaluate(validation_);
    return rep.macro_f1;
  }

  EvaluationReport evaluate(const EncodedSet& set) {
    std::vector<int> predictions = predict(set);
    int num_classes = model_.spec().num_classes;
    return report(set.labels, predictions, num_classes);
  }

  std::vector<int> predict(const EncodedSet& set) {
    std::vector<int> out;
    const int time = set.max_len;
    const int chunk = 256;  // bounds activation memory
    for (int start = 0; start < set.size(); start += chunk) {
      const int b = std::min(chunk, set.size() - start);
      std::vector<int> tokens(set.tokens.begin() + static_cast<std::ptrdiff_t>(start) * time,
                              set.tokens.begin() + static_cast<std::ptrdiff_t>(start + b) * time);
      std::vector<int> preds = model_.predict(tokens, b, time);
      out.insert(out.end(), preds.begin(), preds.end());
    }
    return out;
  }

  void snapshot() { saved_ = model_.snapshot(); }
  void restore() {
    if (!saved_.empty()) model_.restore(saved_);
  }

  double last_loss() const { return last_loss_; }

 private:
  nn::Model& model_;
  const EncodedSet& train_;
  const EncodedSet& validation_;
  std::vector<double> class_weights_;
  int batch_size_;
  nn::AdamState adam_;
  Rng shuffle_rng_, dropout_rng_;
  std::vector<std::size_t> order_;
  std::vector<nn::Tensor> saved_;
  double last_loss_ = 0.0;
};

// ---------------------------------------------------------------------------
// experiment grids
// ---------------------------------------------------------------------------

enum class GridKind { subtask_a, imbalance_b, imbalance_c, epochs, dropout, embeddings };

inline GridKind grid_kind_from_string(const std::string& s) {
  if (s == "subtask_a") return GridKind::subtask_a;
  if (s == "imbalance_b") return GridKind::imbalance_b;
  if (s == "imbalance_c") return GridKind::imbalance_c;
  if (s == "epochs") return GridKind::epochs;
  if (s == "dropout") return GridKind::dropout;
  if (s == "embeddings") return GridKind::embeddings;
  throw config_error("unknown grid '" + s + "'");
}

inline std::string to_string(GridKind g) {
  switch (g) {
    case GridKind::subtask_a: return "subtask_a";
    case GridKind::imbalance_b: return "imbalance_b";
    case GridKind::imbalance_c: return "imbalance_c";
    case GridKind::epochs: return "epochs";
    case GridKind::dropout: return "dropout";
    default: return "embeddings";
  }
}

inline Subtask grid_subtask(GridKind g) {
  switch (g) {
    case GridKind::imbalance_b: return Subtask::b;
    case GridKind::imbalance_c: return Subtask::c;
    default: return Subtask::a;
  }
}

enum class BalanceStrategy { none, smote, class_weights };

inline std::string to_string(BalanceStrategy s) {
  switch (s) {
    case BalanceStrategy::none: return "imbalanced";
    case BalanceStrategy::smote: return "smote";
    default: return "class_weights";
  }
}

inline BalanceStrategy balance_strategy_from_string(const std::string& s) {
  if (s == "imbalanced" || s == "none") return BalanceStrategy::none;
  if (s == "smote") return BalanceStrategy::smote;
  if (s == "class_weights") return BalanceStrategy::class_weights;
  throw config_error("unknown balance strategy '" + s + "'");
}

struct ExperimentConfig {
  GridKind grid = GridKind::subtask_a;
  std::uint64_t master_seed = 1;
  int k_folds = 5;
  double holdout_ratio = 0.2;    // test share of the whole set
  double inner_val_ratio = 0.1;  // early-stopping share of train_val
  int epochs_cap = 30;
  int patience = 10;
  int batch_size = 64;
  int max_len = 50;
  int vocab_max_size = 20000;
  int vocab_min_freq = 1;
  int smote_k = 5;
  nn::ModelSpec model;  // hyperparameter template; variant etc. set per cell
  nn::AdamConfig adam;
  PipelineConfig pipeline;
  // embedding key -> GloVe text file path; key "none" never touches a file
  std::map<std::string, std::string> embedding_files;
  std::string default_embedding = "none";
};

// Seed fan-out (see rng.hpp): grid-level streams come off the master seed,
// per-cell streams off mix_seed(master, cell_index), per-fold streams off
// mix_seed(cell_seed, 1000 + fold).
namespace seed_stream {
constexpr std::uint64_t split = 0xA11;
constexpr std::uint64_t embedding = 0xE3B;
constexpr std::uint64_t model_init = 1;
constexpr std::uint64_t smote = 2;
constexpr std::uint64_t shuffle = 3;
constexpr std::uint64_t dropout = 4;
constexpr std::uint64_t inner_split = 5;
}  // namespace seed_stream

inline int embedding_dim_for_key(const std::string& key, int fallback) {
  if (key == "twitter-100d") return 100;
  if (key == "twitter-200d") return 200;
  if (key == "commoncrawl-300d") return 300;
  if (key == "none") return fallback;
  throw config_error("unknown embedding key '" + key + "'");
}

inline int embedding_key_index(const std::string& key) {
  if (key == "twitter-100d") return 0;
  if (key == "twitter-200d") return 1;
  if (key == "commoncrawl-300d") return 2;
  if (key == "none") return 3;
  throw config_error("unknown embedding key '" + key + "'");
}

struct FoldOutcome {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  int best_epoch = 0;
};

struct RunResult {
  std::vector<FoldOutcome> folds;
  double mean_accuracy = 0.0;
  double mean_macro_f1 = 0.0;
  double wall_seconds = 0.0;
};

struct CellOutcome {
  std::string cell_id;
  bool ok = false;
  std::string message;  // failure reason when !ok
  RunResult result;
};

struct GridReport {
  GridKind grid;
  std::vector<CellOutcome> cells;
};

struct CellPlan {
  std::string cell_id;
  nn::Variant variant = nn::Variant::BiLSTM_CNN;
  BalanceStrategy strategy = BalanceStrategy::none;
  std::string embedding_key;
  int fixed_epochs = 0;       // >0: train exactly this many epochs, no early stop
  double dropout_rate = -1.0; // >=0 overrides the spec's spatial dropout rate
  std::map<std::string, std::string> provenance;  // extra kv stored with the cell
};

namespace detail {

inline std::vector<CellPlan> plan_grid(const ExperimentConfig& cfg) {
  std::vector<CellPlan> plans;
  auto base = [&cfg](const std::string& id, nn::Variant v) {
    CellPlan p;
    p.cell_id = id;
    p.variant = v;
    p.embedding_key = cfg.default_embedding;
    return p;
  };
  switch (cfg.grid) {
    case GridKind::subtask_a: {
      for (nn::Variant v : nn::all_variants()) {
        plans.push_back(base("subtask_a/" + nn::to_string(v), v));
      }
      break;
    }
    case GridKind::imbalance_b:
    case GridKind::imbalance_c: {
      const std::string grid_name = to_string(cfg.grid);
      for (const std::string& m : imbalance_models()) {
        for (BalanceStrategy s : {BalanceStrategy::none, BalanceStrategy::smote,
                                  BalanceStrategy::class_weights}) {
          CellPlan p = base(grid_name + "/" + m + "/" + to_string(s),
                            nn::variant_from_string(m));
          p.strategy = s;
          p.provenance["strategy"] = to_string(s);
          plans.push_back(std::move(p));
        }
      }
      break;
    }
    case GridKind::epochs: {
      for (const std::string& m : sweep_models()) {
        for (int e : {5, 10, 20}) {
          CellPlan p = base("epochs/" + m + "/" + std::to_string(e),
                            nn::variant_from_string(m));
          p.fixed_epochs = e;
          p.provenance["epochs"] = std::to_string(e);
          plans.push_back(std::move(p));
        }
      }
      break;
    }
    case GridKind::dropout: {
      for (const std::string& m : sweep_models()) {
        for (const auto& [key, rate] :
             std::vector<std::pair<std::string, double>>{
                 {"0.20", 0.20}, {"0.35", 0.35}, {"0.50", 0.50}, {"none", 0.0}}) {
          CellPlan p = base("dropout/" + m + "/" + key,
                            nn::variant_from_string(m));
          p.dropout_rate = rate;
          p.provenance["dropout"] = key;
          plans.push_back(std::move(p));
        }
      }
      break;
    }
    case GridKind::embeddings: {
      for (const std::string& m : sweep_models()) {
        for (const std::string& key :
             {"twitter-100d", "twitter-200d", "commoncrawl-300d", "none"}) {
          CellPlan p = base("embeddings/" + m + "/" + key,
                            nn::variant_from_string(m));
          p.embedding_key = key;
          p.provenance["embedding"] = key;
          plans.push_back(std::move(p));
        }
      }
      break;
    }
  }
  return plans;
}

inline std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

// Shared per-grid context: preprocessed + encoded corpus, outer split, vocab.
class GridRunner {
 public:
  GridRunner(const ExperimentConfig& cfg, const std::vector<TweetRecord>& records,
             const PipelineResources& resources)
      : cfg_(cfg) {
    subtask_ = grid_subtask(cfg.grid);
    rows_ = select_for_subtask(records, subtask_);
    if (rows_.empty()) {
      throw data_error("no records carry a label for subtask " + to_string(subtask_));
    }
    num_classes_ = static_cast<int>(subtask_class_names(subtask_).size());
    labels_.reserve(rows_.size());
    for (const auto& r : rows_) labels_.push_back(r.label);

    std::vector<std::vector<std::string>> token_lists;
    token_lists.reserve(rows_.size());
    for (const auto& r : rows_) {
      token_lists.push_back(preprocess(r.text, cfg.pipeline, resources));
    }

    Rng split_rng(mix_seed(cfg.master_seed, seed_stream::split));
    split_ = stratified_holdout(labels_, cfg.holdout_ratio, split_rng);

    std::vector<std::vector<std::string>> train_val_tokens;
    train_val_tokens.reserve(split_.train.size());
    for (std::size_t i : split_.train) train_val_tokens.push_back(token_lists[i]);
    vocab_ = build_vocabulary(train_val_tokens, cfg.vocab_max_size, cfg.vocab_min_freq);

    encoded_.reserve(rows_.size());
    for (const auto& toks : token_lists) {
      encoded_.push_back(encode(toks, vocab_, cfg.max_len));
    }
  }

  const Vocabulary& vocab() const { return vocab_; }
  const SplitPlan& split() const { return split_; }
  int num_classes() const { return num_classes_; }
  const std::vector<int>& labels() const { return labels_; }
  Subtask subtask() const { return subtask_; }

  GridReport run(ResultsStore& store) {
    GridReport report_out;
    report_out.grid = cfg_.grid;
    auto plans = detail::plan_grid(cfg_);
    for (std::size_t i = 0; i < plans.size(); ++i) {
      CellOutcome outcome = run_cell(plans[i], static_cast<std::uint64_t>(i));
      write_cell(store, plans[i], outcome);
      report_out.cells.push_back(std::move(outcome));
    }
    return report_out;
  }

  CellOutcome run_cell(const CellPlan& plan, std::uint64_t cell_index) {
    CellOutcome outcome;
    outcome.cell_id = plan.cell_id;
    auto started = std::chrono::steady_clock::now();
    try {
      const std::uint64_t cell_seed = mix_seed(cfg_.master_seed, cell_index);
      const EmbeddingBuild& emb = embedding_for(plan.embedding_key);
      if (cfg_.grid == GridKind::subtask_a) {
        run_cv_cell(plan, cell_seed, emb, outcome.result);
      } else {
        run_holdout_cell(plan, cell_seed, emb, outcome.result);
      }
      outcome.ok = true;
    } catch (const data_error& e) {
      outcome.message = e.what();
    } catch (const numeric_error& e) {
      outcome.message = e.what();
    }
    outcome.result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
            .count();
    return outcome;
  }

  // Trains one configuration outside any grid (the CLI train command).
  // When keep is non-null it receives the trained model: the holdout model,
  // or under cross-validation the model from the best-scoring fold.
  RunResult train_cell(const CellPlan& plan, bool cross_validate,
                       std::unique_ptr<nn::Model>* keep) {
    RunResult result;
    const std::uint64_t cell_seed = mix_seed(cfg_.master_seed, 0);
    const EmbeddingBuild& emb = embedding_for(plan.embedding_key);
    if (cross_validate) {
      run_cv_cell(plan, cell_seed, emb, result, keep);
    } else {
      run_holdout_cell(plan, cell_seed, emb, result, keep);
    }
    return result;
  }

  double embedding_coverage(const std::string& key) {
    return embedding_for(key).coverage;
  }

 private:
  nn::ModelSpec spec_for(const CellPlan& plan, int embedding_dim,
                         std::uint64_t model_seed) const {
    nn::ModelSpec spec = cfg_.model;
    spec.variant = plan.variant;
    spec.num_classes = num_classes_;
    spec.embedding_dim = embedding_dim;
    if (plan.dropout_rate >= 0.0) spec.spatial_dropout_rate = plan.dropout_rate;
    spec.seed = model_seed;
    return spec;
  }

  const EmbeddingBuild& embedding_for(const std::string& key) {
    auto it = embeddings_.find(key);
    if (it != embeddings_.end()) return it->second;
    const int dim = embedding_dim_for_key(key, cfg_.model.embedding_dim);
    EmbeddingTable table;
    if (key != "none") {
      auto path_it = cfg_.embedding_files.find(key);
      if (path_it == cfg_.embedding_files.end()) {
        throw data_error("no embedding file configured for '" + key + "'");
      }
      table = load_embeddings(path_it->second, dim);
    }
    std::uint64_t seed = mix_seed(mix_seed(cfg_.master_seed, seed_stream::embedding),
                                  static_cast<std::uint64_t>(embedding_key_index(key)));
    auto [pos, inserted] =
        embeddings_.emplace(key, build_embedding_matrix(vocab_, table, dim, seed));
    return pos->second;
  }

  EncodedSet gather(const std::vector<std::size_t>& source,
                    const std::vector<std::size_t>& subset) const {
    // subset holds positions into `source`, which holds dataset indices
    EncodedSet set;
    set.max_len = cfg_.max_len;
    for (std::size_t pos : subset) {
      std::size_t i = source[pos];
      set.add(encoded_[i], labels_[i]);
    }
    return set;
  }

  EncodedSet gather_direct(const std::vector<std::size_t>& indices) const {
    EncodedSet set;
    set.max_len = cfg_.max_len;
    for (std::size_t i : indices) set.add(encoded_[i], labels_[i]);
    return set;
  }

  // Applies the cell's imbalance strategy to an already-gathered training
  // set. SMOTE works on the padded token-index vectors and rounds back into
  // token space; class weighting rescales the loss instead.
  std::vector<double> apply_strategy(const CellPlan& plan,
                                     EncodedSet& train, std::uint64_t fold_seed) {
    std::vector<double> weights(static_cast<std::size_t>(num_classes_), 1.0);
    switch (plan.strategy) {
      case BalanceStrategy::none:
        break;
      case BalanceStrategy::class_weights: {
        ClassWeightTable table = class_weights(train.labels, num_classes_);
        weights = table.weights;
        break;
      }
      case BalanceStrategy::smote: {
        FeatureMatrix x;
        x.reserve(train.labels.size());
        const int time = train.max_len;
        for (std::size_t row = 0; row < train.labels.size(); ++row) {
          x.emplace_back(train.tokens.begin() + static_cast<std::ptrdiff_t>(row) * time,
                         train.tokens.begin() + static_cast<std::ptrdiff_t>(row + 1) * time);
        }
        SmoteConfig sc;
        sc.k_neighbors = cfg_.smote_k;
        sc.seed = mix_seed(fold_seed, seed_stream::smote);
        SmoteResult result = smote(x, train.labels, sc);
        std::vector<std::vector<int>> rounded =
            round_to_token_space(result.X, vocab_.size());
        EncodedSet balanced;
        balanced.max_len = time;
        for (std::size_t row = 0; row < rounded.size(); ++row) {
          balanced.add(rounded[row], result.y[row]);
        }
        train = std::move(balanced);
        break;
      }
    }
    return weights;
  }

  void run_cv_cell(const CellPlan& plan, std::uint64_t cell_seed,
                   const EmbeddingBuild& emb, RunResult& result,
                   std::unique_ptr<nn::Model>* keep = nullptr) {
    std::vector<int> tv_labels;
    tv_labels.reserve(split_.train.size());
    for (std::size_t i : split_.train) tv_labels.push_back(labels_[i]);
    Rng fold_rng(mix_seed(cell_seed, seed_stream::split));
    auto folds = stratified_kfold(tv_labels, cfg_.k_folds, fold_rng);

    double best_kept = -1.0;
    for (std::size_t f = 0; f < folds.size(); ++f) {
      const std::uint64_t fold_seed = mix_seed(cell_seed, 1000 + f);
      auto train_positions = train_indices_for_fold(folds, f);
      EncodedSet train = gather(split_.train, train_positions);
      EncodedSet validation = gather(split_.train, folds[f]);
      std::vector<double> weights = apply_strategy(plan, train, fold_seed);

      nn::ModelSpec spec = spec_for(plan, emb.matrix.dim,
                                    mix_seed(fold_seed, seed_stream::model_init));
      nn::Model model(spec, emb.matrix);
      MinibatchTrainer trainer(model, train, validation, weights, cfg_.batch_size,
                               mix_seed(fold_seed, seed_stream::shuffle),
                               mix_seed(fold_seed, seed_stream::dropout), cfg_.adam);
      FitSummary fit;
      try {
        fit = fit_with_early_stopping(trainer, cfg_.epochs_cap, cfg_.patience);
      } catch (const numeric_error& e) {
        throw numeric_error(std::string(e.what()) + " (fold " + std::to_string(f) +
                            ")");
      }
      EvaluationReport rep = trainer.evaluate(validation);
      result.folds.push_back({rep.accuracy, rep.macro_f1, fit.best_epoch});
      if (keep && rep.macro_f1 > best_kept) {
        best_kept = rep.macro_f1;
        *keep = std::make_unique<nn::Model>(std::move(model));
      }
    }
    finish(result);
  }

  void run_holdout_cell(const CellPlan& plan, std::uint64_t cell_seed,
                        const EmbeddingBuild& emb, RunResult& result,
                        std::unique_ptr<nn::Model>* keep = nullptr) {
    const std::uint64_t fold_seed = mix_seed(cell_seed, 1000);
    EncodedSet test = gather_direct(split_.eval);
    EncodedSet train;
    EncodedSet validation;
    FitSummary fit;

    nn::ModelSpec spec = spec_for(plan, emb.matrix.dim,
                                  mix_seed(fold_seed, seed_stream::model_init));

    if (plan.fixed_epochs > 0) {
      // Epoch sweep: train on all of train_val for exactly N epochs and keep
      // the final weights; the test split doubles as the per-epoch monitor.
      train = gather_direct(split_.train);
      std::vector<double> weights = apply_strategy(plan, train, fold_seed);
      nn::Model model(spec, emb.matrix);
      MinibatchTrainer trainer(model, train, test, weights, cfg_.batch_size,
                               mix_seed(fold_seed, seed_stream::shuffle),
                               mix_seed(fold_seed, seed_stream::dropout), cfg_.adam);
      fit = fit_fixed_epochs(trainer, plan.fixed_epochs);
      EvaluationReport rep = trainer.evaluate(test);
      result.folds.push_back({rep.accuracy, rep.macro_f1, fit.best_epoch});
      finish(result);
      if (keep) *keep = std::make_unique<nn::Model>(std::move(model));
      return;
    }

    // Early stopping monitors an inner validation slice carved from
    // train_val, so the reported test split never steers training.
    std::vector<int> tv_labels;
    tv_labels.reserve(split_.train.size());
    for (std::size_t i : split_.train) tv_labels.push_back(labels_[i]);
    Rng inner_rng(mix_seed(fold_seed, seed_stream::inner_split));
    SplitPlan inner = stratified_holdout(tv_labels, cfg_.inner_val_ratio, inner_rng);
    train = gather(split_.train, inner.train);
    validation = gather(split_.train, inner.eval);
    std::vector<double> weights = apply_strategy(plan, train, fold_seed);

    nn::Model model(spec, emb.matrix);
    MinibatchTrainer trainer(model, train, validation, weights, cfg_.batch_size,
                             mix_seed(fold_seed, seed_stream::shuffle),
                             mix_seed(fold_seed, seed_stream::dropout), cfg_.adam);
    fit = fit_with_early_stopping(trainer, cfg_.epochs_cap, cfg_.patience);
    EvaluationReport rep = trainer.evaluate(test);
    result.folds.push_back({rep.accuracy, rep.macro_f1, fit.best_epoch});
    finish(result);
    if (keep) *keep = std::make_unique<nn::Model>(std::move(model));
  }

  static void finish(RunResult& result) {
    double acc = 0.0, f1 = 0.0;
    for (const FoldOutcome& f : result.folds) {
      acc += f.accuracy;
      f1 += f.macro_f1;
    }
    result.mean_accuracy = acc / static_cast<double>(result.folds.size());
    result.mean_macro_f1 = f1 / static_cast<double>(result.folds.size());
  }

  void write_cell(ResultsStore& store, const CellPlan& plan,
                  const CellOutcome& outcome) const {
    std::map<std::string, std::string> kv;
    kv["grid"] = to_string(cfg_.grid);
    kv["subtask"] = to_string(subtask_);
    kv["variant"] = nn::to_string(plan.variant);
    kv["embedding"] = plan.embedding_key;
    for (const auto& [k, v] : plan.provenance) kv[k] = v;
    if (!outcome.ok) {
      kv["status"] = "failed";
      kv["message"] = outcome.message;
      store.put(plan.cell_id, kv);
      return;
    }
    kv["status"] = "ok";
    const RunResult& r = outcome.result;
    kv["folds"] = std::to_string(r.folds.size());
    for (std::size_t f = 0; f < r.folds.size(); ++f) {
      const std::string p = "fold." + std::to_string(f) + ".";
      kv[p + "accuracy"] = detail::format_full(r.folds[f].accuracy);
      kv[p + "macro_f1"] = detail::format_full(r.folds[f].macro_f1);
      kv[p + "best_epoch"] = std::to_string(r.folds[f].best_epoch);
    }
    kv["mean.accuracy"] = detail::format_full(r.mean_accuracy);
    kv["mean.macro_f1"] = detail::format_full(r.mean_macro_f1);
    // single-split cells also expose unprefixed keys (table renderers use them)
    if (r.folds.size() == 1) {
      kv["accuracy"] = detail::format_full(r.folds[0].accuracy);
      kv["macro_f1"] = detail::format_full(r.folds[0].macro_f1);
      kv["best_epoch"] = std::to_string(r.folds[0].best_epoch);
    }
    store.put(plan.cell_id, kv);
  }

  ExperimentConfig cfg_;
  Subtask subtask_ = Subtask::a;
  std::vector<LabeledTweet> rows_;
  std::vector<int> labels_;
  std::vector<std::vector<int>> encoded_;
  int num_classes_ = 2;
  SplitPlan split_;
  Vocabulary vocab_;
  std::map<std::string, EmbeddingBuild> embeddings_;
};

inline GridReport run_grid(const ExperimentConfig& cfg,
                           const std::vector<TweetRecord>& records,
                           const PipelineResources& resources,
                           ResultsStore& store) {
  GridRunner runner(cfg, records, resources);
  return runner.run(store);
}

}  // namespace olw
