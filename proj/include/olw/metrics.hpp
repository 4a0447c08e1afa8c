#pragma once

#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "olw/errors.hpp"

namespace olw {

// Rows index the true class, columns the predicted class.
struct ConfusionMatrix {
  int num_classes = 0;
  std::vector<long long> counts;  // row-major num_classes x num_classes

  explicit ConfusionMatrix(int classes = 0)
      : num_classes(classes),
        counts(static_cast<std::size_t>(classes) * classes, 0) {}

  long long& at(int truth, int pred) {
    return counts[static_cast<std::size_t>(truth) * num_classes + pred];
  }
  long long at(int truth, int pred) const {
    return counts[static_cast<std::size_t>(truth) * num_classes + pred];
  }

  long long total() const {
    long long n = 0;
    for (long long c : counts) n += c;
    return n;
  }
};

struct ClassScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct EvaluationReport {
  double accuracy = 0.0;
  std::vector<ClassScore> per_class;
  double macro_f1 = 0.0;
  ConfusionMatrix confusion;
};

inline ConfusionMatrix confusion_matrix(const std::vector<int>& y_true,
                                        const std::vector<int>& y_pred,
                                        int num_classes) {
  if (y_true.size() != y_pred.size()) {
    throw config_error("confusion_matrix: y_true and y_pred lengths differ (" +
                       std::to_string(y_true.size()) + " vs " +
                       std::to_string(y_pred.size()) + ")");
  }
  ConfusionMatrix cm(num_classes);
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] < 0 || y_true[i] >= num_classes || y_pred[i] < 0 ||
        y_pred[i] >= num_classes) {
      throw config_error("confusion_matrix: label out of range at position " +
                         std::to_string(i));
    }
    cm.at(y_true[i], y_pred[i])++;
  }
  return cm;
}

// Precision/recall/F1 fall back to 0 when their denominator is 0. The macro
// average divides by num_classes even if a class never occurs.
inline EvaluationReport report(const std::vector<int>& y_true,
                               const std::vector<int>& y_pred,
                               int num_classes) {
  if (y_true.empty()) {
    throw config_error("report: empty input, accuracy undefined");
  }
  EvaluationReport rep;
  rep.confusion = confusion_matrix(y_true, y_pred, num_classes);

  long long correct = 0;
  for (int c = 0; c < num_classes; ++c) correct += rep.confusion.at(c, c);
  rep.accuracy = static_cast<double>(correct) / static_cast<double>(y_true.size());

  double f1_sum = 0.0;
  for (int c = 0; c < num_classes; ++c) {
    long long tp = rep.confusion.at(c, c);
    long long fp = 0, fn = 0;
    for (int o = 0; o < num_classes; ++o) {
      if (o == c) continue;
      fp += rep.confusion.at(o, c);
      fn += rep.confusion.at(c, o);
    }
    ClassScore s;
    s.precision = (tp + fp) > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
    s.recall = (tp + fn) > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
    s.f1 = (s.precision + s.recall) > 0.0
               ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
               : 0.0;
    rep.per_class.push_back(s);
    f1_sum += s.f1;
  }
  rep.macro_f1 = f1_sum / num_classes;
  return rep;
}

// Flat key/value rendering, one `key = value` per line.
inline std::string to_key_values(const EvaluationReport& rep,
                                 const std::vector<std::string>& class_names = {}) {
  std::ostringstream os;
  os.precision(6);
  os << std::fixed;
  os << "accuracy = " << rep.accuracy << "\n";
  os << "macro_f1 = " << rep.macro_f1 << "\n";
  for (std::size_t c = 0; c < rep.per_class.size(); ++c) {
    std::string name = c < class_names.size() ? class_names[c] : "class" + std::to_string(c);
    os << name << ".precision = " << rep.per_class[c].precision << "\n";
    os << name << ".recall = " << rep.per_class[c].recall << "\n";
    os << name << ".f1 = " << rep.per_class[c].f1 << "\n";
  }
  for (int t = 0; t < rep.confusion.num_classes; ++t) {
    os << "confusion.row" << t << " =";
    for (int p = 0; p < rep.confusion.num_classes; ++p) {
      os << " " << rep.confusion.at(t, p);
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace olw
