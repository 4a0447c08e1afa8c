#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "olw/errors.hpp"
#include "olw/rng.hpp"

namespace olw {

// Loss-rescaling weights: weight_c = N / (num_classes * N_c). A balanced
// label set yields all ones, and sum_c N_c * weight_c == N by construction.
struct ClassWeightTable {
  std::vector<double> weights;

  double weight_for(int cls) const { return weights[static_cast<std::size_t>(cls)]; }

  static ClassWeightTable uniform(int num_classes) {
    ClassWeightTable t;
    t.weights.assign(static_cast<std::size_t>(num_classes), 1.0);
    return t;
  }
};

inline ClassWeightTable class_weights(const std::vector<int>& labels,
                                      int num_classes) {
  std::vector<long long> counts(static_cast<std::size_t>(num_classes), 0);
  for (int y : labels) {
    if (y < 0 || y >= num_classes) {
      throw config_error("class_weights: label out of range: " + std::to_string(y));
    }
    ++counts[static_cast<std::size_t>(y)];
  }
  ClassWeightTable table;
  const double n = static_cast<double>(labels.size());
  for (int c = 0; c < num_classes; ++c) {
    if (counts[c] == 0) {
      throw data_error("class_weights: class " + std::to_string(c) +
                       " has no examples, weight undefined");
    }
    table.weights.push_back(n / (num_classes * static_cast<double>(counts[c])));
  }
  return table;
}

using FeatureMatrix = std::vector<std::vector<double>>;

// Row i lists the k nearest rows to row i by Euclidean distance, self
// excluded, distance ties broken by lower index.
inline std::vector<std::vector<int>> nearest_minority_neighbors(
    const FeatureMatrix& X, int k) {
  const int n = static_cast<int>(X.size());
  if (n < 2) throw config_error("nearest_minority_neighbors: need at least 2 rows");
  if (k < 1 || k >= n) {
    throw config_error("nearest_minority_neighbors: k must satisfy 1 <= k <= n-1");
  }
  std::vector<std::vector<int>> neighbors(static_cast<std::size_t>(n));
  std::vector<std::pair<double, int>> order;
  for (int i = 0; i < n; ++i) {
    order.clear();
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double d2 = 0.0;
      for (std::size_t f = 0; f < X[i].size(); ++f) {
        double diff = X[i][f] - X[j][f];
        d2 += diff * diff;
      }
      order.emplace_back(d2, j);
    }
    std::sort(order.begin(), order.end());
    for (int r = 0; r < k; ++r) neighbors[i].push_back(order[r].second);
  }
  return neighbors;
}

struct SmoteConfig {
  int k_neighbors = 5;
  // < 0 means "match the majority class count".
  long long target_count = -1;
  std::uint64_t seed = 0;
};

struct SmoteResult {
  FeatureMatrix X;
  std::vector<int> y;
  std::vector<std::string> warnings;
};

// Oversamples every class below the target count with synthetic rows
//   x_new = x_i + u * (x_nn - x_i),   u ~ Uniform(0,1)
// where x_nn is drawn uniformly among x_i's k nearest same-class neighbors.
// Original rows come first, bit-exact and in their input order; synthetic
// rows follow grouped by ascending class. Deterministic given cfg.seed.
inline SmoteResult smote(const FeatureMatrix& X, const std::vector<int>& y,
                         const SmoteConfig& cfg) {
  if (X.size() != y.size()) throw config_error("smote: X and y lengths differ");
  if (cfg.k_neighbors < 1) throw config_error("smote: k_neighbors must be >= 1");

  std::map<int, std::vector<int>> by_class;
  for (std::size_t i = 0; i < y.size(); ++i) by_class[y[i]].push_back(static_cast<int>(i));

  long long majority = 0;
  for (const auto& [cls, rows] : by_class) {
    majority = std::max(majority, static_cast<long long>(rows.size()));
  }
  long long target = cfg.target_count < 0 ? majority : cfg.target_count;
  if (target < majority) {
    throw config_error("smote: target_count " + std::to_string(target) +
                       " is below the majority class count " + std::to_string(majority));
  }

  SmoteResult result;
  result.X = X;
  result.y = y;

  Rng rng(cfg.seed);
  for (const auto& [cls, rows] : by_class) {
    const long long count = static_cast<long long>(rows.size());
    if (count >= target) continue;
    if (count < 2) {
      throw data_error("smote: class " + std::to_string(cls) +
                       " has a single example, no neighbor to interpolate with");
    }
    int k = cfg.k_neighbors;
    if (count <= k) {
      k = static_cast<int>(count) - 1;
      result.warnings.push_back("class " + std::to_string(cls) + " has only " +
                                std::to_string(count) + " examples; k reduced to " +
                                std::to_string(k));
    }
    FeatureMatrix class_rows;
    class_rows.reserve(rows.size());
    for (int idx : rows) class_rows.push_back(X[static_cast<std::size_t>(idx)]);
    auto neighbors = nearest_minority_neighbors(class_rows, k);

    for (long long s = 0; s < target - count; ++s) {
      int base = static_cast<int>(rng.below(static_cast<std::size_t>(count)));
      int nn = neighbors[base][rng.below(static_cast<std::size_t>(k))];
      double u = rng.uniform();
      std::vector<double> synth(class_rows[base].size());
      for (std::size_t f = 0; f < synth.size(); ++f) {
        synth[f] = class_rows[base][f] + u * (class_rows[nn][f] - class_rows[base][f]);
      }
      result.X.push_back(std::move(synth));
      result.y.push_back(cls);
    }
  }
  return result;
}

// Rounds interpolated feature rows back to valid token indices.
inline std::vector<std::vector<int>> round_to_token_space(const FeatureMatrix& X,
                                                          int vocab_size) {
  std::vector<std::vector<int>> out;
  out.reserve(X.size());
  for (const auto& row : X) {
    std::vector<int> r(row.size());
    for (std::size_t f = 0; f < row.size(); ++f) {
      long long v = std::llround(row[f]);
      r[f] = static_cast<int>(std::clamp<long long>(v, 0, vocab_size - 1));
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace olw
