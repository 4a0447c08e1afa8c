#include <olw/harness.hpp>
#include <olw/rng.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

using Catch::Matchers::ContainsSubstring;

namespace {

std::vector<int> random_labels(olw::Rng& rng, int num_classes,
                               std::size_t min_per_class, std::size_t extra) {
  std::vector<int> labels;
  for (int c = 0; c < num_classes; ++c) {
    labels.insert(labels.end(), min_per_class + rng.below(extra), c);
  }
  rng.shuffle(labels);
  return labels;
}

std::map<int, long long> class_counts(const std::vector<int>& labels,
                                      const std::vector<std::size_t>& subset) {
  std::map<int, long long> counts;
  for (std::size_t i : subset) ++counts[labels[i]];
  return counts;
}

}  // namespace

TEST_CASE("holdout splits are disjoint, covering, and stratified", "[harness]") {
  olw::Rng rng(90210);
  for (int iter = 0; iter < 100; ++iter) {
    int num_classes = 2 + static_cast<int>(rng.below(3));
    auto labels = random_labels(rng, num_classes, 2, 60);
    double ratio = 0.1 + 0.4 * rng.uniform();

    auto plan = olw::stratified_holdout(labels, ratio, rng);

    std::set<std::size_t> train(plan.train.begin(), plan.train.end());
    std::set<std::size_t> eval(plan.eval.begin(), plan.eval.end());
    REQUIRE(train.size() == plan.train.size());
    REQUIRE(eval.size() == plan.eval.size());
    REQUIRE(train.size() + eval.size() == labels.size());
    for (std::size_t i : eval) REQUIRE(train.count(i) == 0);

    REQUIRE(std::is_sorted(plan.train.begin(), plan.train.end()));
    REQUIRE(std::is_sorted(plan.eval.begin(), plan.eval.end()));

    // Per class the eval share is the rounded ratio, clamped so both sides
    // keep at least one example.
    std::map<int, long long> total;
    for (int y : labels) ++total[y];
    auto eval_counts = class_counts(labels, plan.eval);
    auto train_counts = class_counts(labels, plan.train);
    for (const auto& [cls, n] : total) {
      long long want = std::llround(ratio * static_cast<double>(n));
      want = std::clamp<long long>(want, 1, n - 1);
      REQUIRE(eval_counts[cls] == want);
      REQUIRE(train_counts[cls] == n - want);
      REQUIRE(std::llabs(eval_counts[cls] -
                         std::llround(ratio * static_cast<double>(n))) <= 1);
    }
  }
}

TEST_CASE("holdout validates ratio and class sizes", "[harness]") {
  olw::Rng rng(1);
  std::vector<int> labels{0, 0, 1, 1};
  REQUIRE_THROWS_AS(olw::stratified_holdout(labels, 0.0, rng), olw::config_error);
  REQUIRE_THROWS_AS(olw::stratified_holdout(labels, 1.0, rng), olw::config_error);
  REQUIRE_THROWS_AS(olw::stratified_holdout({}, 0.2, rng), olw::config_error);
  REQUIRE_THROWS_AS(olw::stratified_holdout({0, 0, -1, 0}, 0.2, rng),
                    olw::config_error);
  REQUIRE_THROWS_WITH(olw::stratified_holdout({0, 0, 1}, 0.2, rng),
                      ContainsSubstring("fewer than 2"));
}

TEST_CASE("k-fold partitions evenly within every class", "[harness]") {
  olw::Rng rng(31337);
  for (int iter = 0; iter < 100; ++iter) {
    int k = 2 + static_cast<int>(rng.below(4));
    int num_classes = 2 + static_cast<int>(rng.below(3));
    auto labels = random_labels(rng, num_classes,
                                static_cast<std::size_t>(k), 40);

    auto folds = olw::stratified_kfold(labels, k, rng);
    REQUIRE(folds.size() == static_cast<std::size_t>(k));

    std::set<std::size_t> seen;
    for (const auto& fold : folds) {
      REQUIRE(std::is_sorted(fold.begin(), fold.end()));
      for (std::size_t i : fold) REQUIRE(seen.insert(i).second);
    }
    REQUIRE(seen.size() == labels.size());

    std::map<int, long long> total;
    for (int y : labels) ++total[y];
    for (const auto& fold : folds) {
      auto counts = class_counts(labels, fold);
      for (const auto& [cls, n] : total) {
        double even = static_cast<double>(n) / k;
        REQUIRE(std::abs(counts[cls] - even) <= 1.0);
      }
    }

    // Fold complements partition the data too.
    auto train = olw::train_indices_for_fold(folds, 0);
    REQUIRE(train.size() + folds[0].size() == labels.size());
    for (std::size_t i : folds[0]) {
      REQUIRE_FALSE(std::binary_search(train.begin(), train.end(), i));
    }
  }
}

TEST_CASE("k-fold validates k against class sizes", "[harness]") {
  olw::Rng rng(2);
  REQUIRE_THROWS_AS(olw::stratified_kfold({0, 0, 1, 1}, 1, rng), olw::config_error);
  REQUIRE_THROWS_AS(olw::stratified_kfold({}, 2, rng), olw::config_error);
  REQUIRE_THROWS_WITH(olw::stratified_kfold({0, 0, 0, 1, 1}, 3, rng),
                      ContainsSubstring("fewer than k=3"));
}

namespace {

// Trainer stub driven by a scripted validation curve.
struct ScriptedTrainer {
  std::vector<double> scores;
  int epochs_seen = 0;
  int snapshots = 0;
  int restores = 0;
  int snapshot_epoch = -1;
  int restored_epoch = -1;

  void run_epoch(int epoch) {
    REQUIRE(epoch == epochs_seen + 1);  // 1-based, contiguous
    ++epochs_seen;
  }
  double validation_score() { return scores[static_cast<std::size_t>(epochs_seen - 1)]; }
  void snapshot() {
    ++snapshots;
    snapshot_epoch = epochs_seen;
  }
  void restore() {
    ++restores;
    restored_epoch = snapshot_epoch;
  }
};

}  // namespace

TEST_CASE("early stopping halts after patience and restores the best epoch",
          "[harness]") {
  ScriptedTrainer t;
  t.scores = {0.10, 0.50, 0.40, 0.45, 0.30, 0.90};
  auto fit = olw::fit_with_early_stopping(t, 6, 2);

  // Epochs 3 and 4 fail to beat 0.50, so epoch 6 is never reached.
  CHECK(fit.epochs_run == 4);
  CHECK(fit.best_epoch == 2);
  CHECK(fit.best_score == 0.50);
  CHECK(fit.history == std::vector<double>{0.10, 0.50, 0.40, 0.45});
  CHECK(t.snapshots == 2);
  CHECK(t.restores == 1);
  CHECK(t.restored_epoch == 2);
}

TEST_CASE("early stopping requires strict improvement", "[harness]") {
  ScriptedTrainer t;
  t.scores = {0.5, 0.5, 0.5};
  auto fit = olw::fit_with_early_stopping(t, 3, 2);
  // Ties do not reset patience.
  CHECK(fit.epochs_run == 3);
  CHECK(fit.best_epoch == 1);
  CHECK(t.snapshots == 1);
}

TEST_CASE("early stopping runs to the cap when scores keep improving",
          "[harness]") {
  ScriptedTrainer t;
  t.scores = {0.1, 0.2, 0.3, 0.4};
  auto fit = olw::fit_with_early_stopping(t, 4, 1);
  CHECK(fit.epochs_run == 4);
  CHECK(fit.best_epoch == 4);
  CHECK(fit.best_score == 0.4);
  CHECK(t.restored_epoch == 4);

  ScriptedTrainer bad;
  REQUIRE_THROWS_AS(olw::fit_with_early_stopping(bad, 0, 1), olw::config_error);
  REQUIRE_THROWS_AS(olw::fit_with_early_stopping(bad, 1, 0), olw::config_error);
}

TEST_CASE("the best score never decreases over random curves", "[harness]") {
  olw::Rng rng(555);
  for (int iter = 0; iter < 50; ++iter) {
    ScriptedTrainer t;
    int n = 1 + static_cast<int>(rng.below(20));
    for (int i = 0; i < n; ++i) t.scores.push_back(rng.uniform());
    int patience = 1 + static_cast<int>(rng.below(5));

    auto fit = olw::fit_with_early_stopping(t, n, patience);
    double best = *std::max_element(fit.history.begin(), fit.history.end());
    REQUIRE(fit.best_score == best);
    REQUIRE(fit.history[static_cast<std::size_t>(fit.best_epoch - 1)] == best);
    REQUIRE(fit.epochs_run <= n);
    REQUIRE(fit.history.size() == static_cast<std::size_t>(fit.epochs_run));
    REQUIRE(t.restores == 1);
    // The run extends at most `patience` epochs past the best one.
    REQUIRE(fit.epochs_run <= fit.best_epoch + patience);
  }
}

TEST_CASE("fixed-epoch fitting keeps the final weights", "[harness]") {
  ScriptedTrainer t;
  t.scores = {0.9, 0.2, 0.4};
  auto fit = olw::fit_fixed_epochs(t, 3);
  CHECK(fit.epochs_run == 3);
  CHECK(fit.best_epoch == 3);  // by definition: last epoch wins
  CHECK(fit.best_score == 0.4);
  CHECK(t.snapshots == 0);
  CHECK(t.restores == 0);

  ScriptedTrainer bad;
  REQUIRE_THROWS_AS(olw::fit_fixed_epochs(bad, 0), olw::config_error);
}
