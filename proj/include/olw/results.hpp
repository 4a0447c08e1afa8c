#pragma once

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "olw/config.hpp"
#include "olw/errors.hpp"
#include "olw/nn/variant.hpp"

namespace olw {

// Directory-backed store of experiment cell results. Each cell is a sorted
// key = value text file under cells/, and index.tsv records cell ids in
// insertion order. Cell contents are fully deterministic, so two runs of the
// same grid produce byte-identical stores.
class ResultsStore {
 public:
  static ResultsStore open(const std::string& dir) {
    namespace fs = std::filesystem;
    ResultsStore store;
    store.dir_ = dir;
    fs::create_directories(fs::path(dir) / "cells");
    std::ifstream index(fs::path(dir) / "index.tsv");
    if (index) {
      std::string line;
      while (std::getline(index, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos) {
          throw data_error(dir + "/index.tsv: malformed line '" + line + "'");
        }
        store.ids_.push_back(line.substr(0, tab));
        store.files_[store.ids_.back()] = line.substr(tab + 1);
      }
    }
    return store;
  }

  const std::string& dir() const { return dir_; }
  const std::vector<std::string>& ids() const { return ids_; }
  bool has(const std::string& cell_id) const { return files_.count(cell_id) > 0; }

  void put(const std::string& cell_id,
           const std::map<std::string, std::string>& values) {
    namespace fs = std::filesystem;
    if (has(cell_id)) {
      throw config_error("results store already has cell '" + cell_id + "'");
    }
    std::string file = sanitize(cell_id) + ".txt";
    for (const auto& [id, f] : files_) {
      if (f == file) {
        throw config_error("cell '" + cell_id + "' collides with '" + id + "'");
      }
    }
    std::ofstream out(fs::path(dir_) / "cells" / file);
    if (!out) throw data_error("cannot write cell file for '" + cell_id + "'");
    for (const auto& [k, v] : values) out << k << " = " << v << "\n";
    out.close();
    std::ofstream index(fs::path(dir_) / "index.tsv", std::ios::app);
    if (!index) throw data_error("cannot append to index.tsv in " + dir_);
    index << cell_id << "\t" << file << "\n";
    ids_.push_back(cell_id);
    files_[cell_id] = file;
  }

  std::map<std::string, std::string> get(const std::string& cell_id) const {
    namespace fs = std::filesystem;
    auto it = files_.find(cell_id);
    if (it == files_.end()) {
      throw config_error("results store has no cell '" + cell_id + "'");
    }
    std::ifstream in(fs::path(dir_) / "cells" / it->second);
    if (!in) throw data_error("cannot open cell file for '" + cell_id + "'");
    std::map<std::string, std::string> out;
    std::string line;
    long long line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw data_error(it->second + ":" + std::to_string(line_no) +
                         ": malformed cell line");
      }
      out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
  }

  static std::string sanitize(const std::string& cell_id) {
    std::string out;
    for (char c : cell_id) {
      if (c == '/') {
        out += "__";
      } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '.' ||
                 c == '-' || c == '_') {
        out += c;
      } else {
        out += '_';
      }
    }
    return out;
  }

 private:
  std::string dir_;
  std::vector<std::string> ids_;
  std::map<std::string, std::string> files_;
};

namespace detail {

inline std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", fraction * 100.0);
  return buf;
}

inline std::string format_f1(double f1) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", f1);
  return buf;
}

// Looks up `key` in the cell, or "n/a" when the cell is absent or failed.
inline std::string cell_value(const ResultsStore& store, const std::string& cell_id,
                              const std::string& key, bool percent) {
  if (!store.has(cell_id)) return "n/a";
  auto kv = store.get(cell_id);
  if (auto st = kv.find("status"); st != kv.end() && st->second != "ok") return "n/a";
  auto it = kv.find(key);
  if (it == kv.end()) return "n/a";
  double v = std::strtod(it->second.c_str(), nullptr);
  return percent ? format_percent(v) : format_f1(v);
}

struct TableData {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline std::string render(const TableData& t, const std::string& format) {
  std::ostringstream out;
  if (format == "md") {
    out << "|";
    for (const auto& h : t.header) out << " " << h << " |";
    out << "\n|";
    for (std::size_t i = 0; i < t.header.size(); ++i) out << " --- |";
    out << "\n";
    for (const auto& row : t.rows) {
      out << "|";
      for (const auto& cell : row) out << " " << cell << " |";
      out << "\n";
    }
  } else if (format == "csv") {
    auto emit_row = [&out](const std::vector<std::string>& row) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out << ",";
        bool quote = row[i].find_first_of(",\"") != std::string::npos;
        if (quote) {
          out << '"';
          for (char c : row[i]) {
            if (c == '"') out << '"';
            out << c;
          }
          out << '"';
        } else {
          out << row[i];
        }
      }
      out << "\n";
    };
    emit_row(t.header);
    for (const auto& row : t.rows) emit_row(row);
  } else {
    throw config_error("unknown table format '" + format + "' (expected md or csv)");
  }
  return out.str();
}

}  // namespace detail

// The sweep tables compare these two architectures.
inline const std::vector<std::string>& sweep_models() {
  static const std::vector<std::string> models{"BiLSTM-CNN", "BiGRU-CNN"};
  return models;
}

// Row order of the imbalance-strategy tables.
inline const std::vector<std::string>& imbalance_models() {
  static const std::vector<std::string> models{"BiLSTM-CNN", "BiGRU-CNN",
                                               "BiLSTM", "BiGRU"};
  return models;
}

inline const std::vector<std::pair<std::string, std::string>>& imbalance_strategies() {
  // display name, cell key
  static const std::vector<std::pair<std::string, std::string>> strategies{
      {"Imbalanced Data", "imbalanced"},
      {"SMOTE", "smote"},
      {"Class Weights", "class_weights"},
  };
  return strategies;
}

inline std::string render_table(const ResultsStore& store, int table,
                                const std::string& format) {
  using detail::cell_value;
  detail::TableData t;
  switch (table) {
    case 2: {
      t.header = {"Models (Subtask A)", "Avg Acc", "Avg Macro F1"};
      for (nn::Variant v : nn::all_variants()) {
        std::string id = "subtask_a/" + nn::to_string(v);
        t.rows.push_back({nn::to_string(v),
                          cell_value(store, id, "mean.accuracy", true),
                          cell_value(store, id, "mean.macro_f1", false)});
      }
      break;
    }
    case 3:
    case 4: {
      const std::string grid = table == 3 ? "imbalance_b" : "imbalance_c";
      const std::string subtask = table == 3 ? "B" : "C";
      t.header = {"Models (Subtask " + subtask + ")"};
      for (const auto& [display, key] : imbalance_strategies()) {
        t.header.push_back(display + " Acc");
        t.header.push_back(display + " Macro F1");
      }
      for (const auto& model : imbalance_models()) {
        std::vector<std::string> row{model};
        for (const auto& [display, key] : imbalance_strategies()) {
          std::string id = grid + "/" + model + "/" + key;
          row.push_back(cell_value(store, id, "accuracy", true));
          row.push_back(cell_value(store, id, "macro_f1", false));
        }
        t.rows.push_back(std::move(row));
      }
      break;
    }
    case 5: {
      t.header = {"Epochs"};
      for (const auto& m : sweep_models()) t.header.push_back(m);
      for (const std::string& epochs : {"5", "10", "20"}) {
        std::vector<std::string> row{epochs};
        for (const auto& m : sweep_models()) {
          row.push_back(cell_value(store, "epochs/" + m + "/" + epochs,
                                   "macro_f1", false));
        }
        t.rows.push_back(std::move(row));
      }
      break;
    }
    case 6: {
      t.header = {"Dropout"};
      for (const auto& m : sweep_models()) t.header.push_back(m);
      static const std::vector<std::pair<std::string, std::string>> rates{
          {"20%", "0.20"}, {"35%", "0.35"}, {"50%", "0.50"}, {"No Dropout", "none"}};
      for (const auto& [display, key] : rates) {
        std::vector<std::string> row{display};
        for (const auto& m : sweep_models()) {
          row.push_back(cell_value(store, "dropout/" + m + "/" + key,
                                   "macro_f1", false));
        }
        t.rows.push_back(std::move(row));
      }
      break;
    }
    case 7: {
      t.header = {"Embeddings"};
      for (const auto& m : sweep_models()) t.header.push_back(m);
      static const std::vector<std::pair<std::string, std::string>> embs{
          {"T - 100d", "twitter-100d"},
          {"T - 200d", "twitter-200d"},
          {"CC - 300d", "commoncrawl-300d"},
          {"No Embs", "none"}};
      for (const auto& [display, key] : embs) {
        std::vector<std::string> row{display};
        for (const auto& m : sweep_models()) {
          row.push_back(cell_value(store, "embeddings/" + m + "/" + key,
                                   "macro_f1", false));
        }
        t.rows.push_back(std::move(row));
      }
      break;
    }
    default:
      throw config_error("table must be between 2 and 7, got " + std::to_string(table));
  }
  return detail::render(t, format);
}

}  // namespace olw
