#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "olw/errors.hpp"
#include "olw/rng.hpp"

namespace olw {

struct SplitPlan {
  std::vector<std::size_t> train;
  std::vector<std::size_t> eval;
};

namespace detail {

inline std::map<int, std::vector<std::size_t>> indices_by_class(
    const std::vector<int>& labels) {
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) throw config_error("negative class label");
    by_class[labels[i]].push_back(i);
  }
  return by_class;
}

}  // namespace detail

// Per class, llround(eval_ratio * count) examples go to the eval side,
// clamped to [1, count-1] so both sides see every class. Classes are
// processed in ascending label order; each class is shuffled once.
inline SplitPlan stratified_holdout(const std::vector<int>& labels,
                                    double eval_ratio, Rng& rng) {
  if (!(eval_ratio > 0.0 && eval_ratio < 1.0)) {
    throw config_error("eval_ratio must lie strictly between 0 and 1");
  }
  if (labels.empty()) throw config_error("cannot split an empty label set");
  SplitPlan plan;
  for (auto& [cls, idx] : detail::indices_by_class(labels)) {
    if (idx.size() < 2) {
      throw data_error("class " + std::to_string(cls) +
                       " has fewer than 2 examples, cannot hold out");
    }
    rng.shuffle(idx);
    auto take = static_cast<std::size_t>(
        std::llround(eval_ratio * static_cast<double>(idx.size())));
    take = std::clamp<std::size_t>(take, 1, idx.size() - 1);
    plan.eval.insert(plan.eval.end(), idx.begin(), idx.begin() + take);
    plan.train.insert(plan.train.end(), idx.begin() + take, idx.end());
  }
  std::sort(plan.train.begin(), plan.train.end());
  std::sort(plan.eval.begin(), plan.eval.end());
  return plan;
}

// Returns the eval indices of each fold. Per class the shuffled indices are
// dealt round-robin (j-th index to fold j mod k), so fold sizes per class
// differ by at most one.
inline std::vector<std::vector<std::size_t>> stratified_kfold(
    const std::vector<int>& labels, int k, Rng& rng) {
  if (k < 2) throw config_error("k-fold requires k >= 2");
  if (labels.empty()) throw config_error("cannot split an empty label set");
  std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
  for (auto& [cls, idx] : detail::indices_by_class(labels)) {
    if (idx.size() < static_cast<std::size_t>(k)) {
      throw data_error("class " + std::to_string(cls) + " has " +
                       std::to_string(idx.size()) + " examples, fewer than k=" +
                       std::to_string(k));
    }
    rng.shuffle(idx);
    for (std::size_t j = 0; j < idx.size(); ++j) {
      folds[j % static_cast<std::size_t>(k)].push_back(idx[j]);
    }
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

inline std::vector<std::size_t> train_indices_for_fold(
    const std::vector<std::vector<std::size_t>>& folds, std::size_t fold_index) {
  std::vector<std::size_t> train;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    if (f == fold_index) continue;
    train.insert(train.end(), folds[f].begin(), folds[f].end());
  }
  std::sort(train.begin(), train.end());
  return train;
}

struct FitSummary {
  int epochs_run = 0;
  int best_epoch = 0;  // 1-based; the epoch whose weights were kept
  double best_score = -std::numeric_limits<double>::infinity();
  std::vector<double> history;  // validation score after each epoch
};

// Generic early-stopping loop. Trainer must provide:
//   void run_epoch(int epoch);        // 1-based epoch number
//   double validation_score();        // higher is better
//   void snapshot();                  // remember current weights
//   void restore();                   // reinstate the remembered weights
// Training stops once `patience` consecutive epochs fail to improve on the
// best score (strict improvement), and the best epoch's weights are restored.
template <typename Trainer>
FitSummary fit_with_early_stopping(Trainer& trainer, int max_epochs, int patience) {
  if (max_epochs < 1) throw config_error("max_epochs must be at least 1");
  if (patience < 1) throw config_error("patience must be at least 1");
  FitSummary out;
  int since_best = 0;
  for (int epoch = 1; epoch <= max_epochs; ++epoch) {
    trainer.run_epoch(epoch);
    double score = trainer.validation_score();
    out.history.push_back(score);
    out.epochs_run = epoch;
    if (score > out.best_score) {
      out.best_score = score;
      out.best_epoch = epoch;
      since_best = 0;
      trainer.snapshot();
    } else if (++since_best >= patience) {
      break;
    }
  }
  trainer.restore();
  return out;
}

// Fixed-length training used by the epoch sweep: no early stop, and the
// final-epoch weights are kept as-is.
template <typename Trainer>
FitSummary fit_fixed_epochs(Trainer& trainer, int epochs) {
  if (epochs < 1) throw config_error("epochs must be at least 1");
  FitSummary out;
  for (int epoch = 1; epoch <= epochs; ++epoch) {
    trainer.run_epoch(epoch);
    double score = trainer.validation_score();
    out.history.push_back(score);
    out.epochs_run = epoch;
    out.best_epoch = epoch;
    out.best_score = score;
  }
  return out;
}

}  // namespace olw
