#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "olw/errors.hpp"
#include "olw/rng.hpp"
#include "olw/text_util.hpp"

namespace olw {

// Token <-> index bijection with pinned sentinels: index 0 pads, index 1 is
// the unknown token. Immutable after construction.
struct Vocabulary {
  static constexpr int pad_index = 0;
  static constexpr int unk_index = 1;
  static constexpr const char* pad_token = "<pad>";
  static constexpr const char* unk_token = "<unk>";

  std::unordered_map<std::string, int> token_to_index;
  std::vector<std::string> index_to_token;

  int size() const { return static_cast<int>(index_to_token.size()); }

  int index_of(const std::string& token) const {
    auto it = token_to_index.find(token);
    return it == token_to_index.end() ? unk_index : it->second;
  }

  std::uint64_t hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& t : index_to_token) {
      h = fnv1a(t, h);
      h = fnv1a("\n", h);
    }
    return h;
  }
};

// Keeps pad, unk, then the most frequent corpus tokens with frequency
// >= min_freq, capped at max_size entries total. Frequency ties break
// lexicographically, so the result is independent of corpus document order.
inline Vocabulary build_vocabulary(
    const std::vector<std::vector<std::string>>& corpus, int max_size,
    int min_freq) {
  if (max_size < 2) throw config_error("build_vocabulary: max_size must be >= 2");
  if (min_freq < 1) throw config_error("build_vocabulary: min_freq must be >= 1");

  std::unordered_map<std::string, long long> freq;
  for (const auto& doc : corpus) {
    for (const auto& token : doc) {
      if (token == Vocabulary::pad_token || token == Vocabulary::unk_token) continue;
      ++freq[token];
    }
  }
  std::vector<std::pair<std::string, long long>> ranked(freq.begin(), freq.end());
  std::erase_if(ranked, [&](const auto& p) { return p.second < min_freq; });
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  Vocabulary vocab;
  vocab.index_to_token = {Vocabulary::pad_token, Vocabulary::unk_token};
  for (const auto& [token, count] : ranked) {
    if (vocab.size() >= max_size) break;
    vocab.index_to_token.push_back(token);
  }
  for (int i = 0; i < vocab.size(); ++i) {
    vocab.token_to_index[vocab.index_to_token[i]] = i;
  }
  return vocab;
}

// Maps tokens to indices (unknown -> unk), truncates past max_len, and
// post-pads shorter sequences with pad_index.
inline std::vector<int> encode(const std::vector<std::string>& tokens,
                               const Vocabulary& vocab, int max_len) {
  if (max_len < 1) throw config_error("encode: max_len must be >= 1");
  std::vector<int> out(static_cast<std::size_t>(max_len), Vocabulary::pad_index);
  for (int i = 0; i < max_len && i < static_cast<int>(tokens.size()); ++i) {
    out[i] = vocab.index_of(tokens[i]);
  }
  return out;
}

using EmbeddingTable = std::unordered_map<std::string, std::vector<double>>;

// Parses GloVe text format: one `token v1 ... vd` per line, space-separated,
// no header. Duplicate tokens keep the first occurrence.
inline EmbeddingTable load_embeddings(const std::string& path, int expected_dim) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open embedding file: " + path);

  EmbeddingTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_whitespace(line);
    if (static_cast<int>(fields.size()) != expected_dim + 1) {
      throw data_error(path + ":" + std::to_string(lineno) + ": expected " +
                       std::to_string(expected_dim) + " values, got " +
                       std::to_string(static_cast<int>(fields.size()) - 1));
    }
    std::vector<double> vec(static_cast<std::size_t>(expected_dim));
    for (int i = 0; i < expected_dim; ++i) {
      const std::string& f = fields[i + 1];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), vec[i]);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        throw data_error(path + ":" + std::to_string(lineno) +
                         ": non-numeric field: " + f);
      }
    }
    table.emplace(fields[0], std::move(vec));  // first occurrence wins
  }
  return table;
}

// |V| x d matrix aligned to a Vocabulary; row 0 (padding) is all zeros.
struct EmbeddingMatrix {
  int vocab_size = 0;
  int dim = 0;
  std::vector<double> values;  // row-major

  double& at(int row, int col) {
    return values[static_cast<std::size_t>(row) * dim + col];
  }
  double at(int row, int col) const {
    return values[static_cast<std::size_t>(row) * dim + col];
  }
};

struct EmbeddingBuild {
  EmbeddingMatrix matrix;
  // Fraction of content tokens (everything past the two sentinels) found in
  // the pretrained table.
  double coverage = 0.0;
};

// Rows present in the table are copied; the padding row stays zero; every
// other row (unk included) draws uniformly from [-0.05, 0.05] with the given
// seed so unknown tokens are distinguishable from padding.
inline EmbeddingBuild build_embedding_matrix(const Vocabulary& vocab,
                                             const EmbeddingTable& table,
                                             int dim, std::uint64_t seed) {
  for (const auto& [token, vec] : table) {
    if (static_cast<int>(vec.size()) != dim) {
      throw config_error("embedding table vector for '" + token + "' has length " +
                         std::to_string(vec.size()) + ", expected " +
                         std::to_string(dim));
    }
  }
  EmbeddingBuild build;
  EmbeddingMatrix& m = build.matrix;
  m.vocab_size = vocab.size();
  m.dim = dim;
  m.values.assign(static_cast<std::size_t>(m.vocab_size) * dim, 0.0);

  Rng rng(seed);
  int content = 0, found = 0;
  for (int row = 1; row < m.vocab_size; ++row) {
    const std::string& token = vocab.index_to_token[row];
    auto it = table.find(token);
    if (row >= 2) {
      ++content;
      if (it != table.end()) ++found;
    }
    if (it != table.end()) {
      for (int j = 0; j < dim; ++j) m.at(row, j) = it->second[j];
    } else {
      for (int j = 0; j < dim; ++j) m.at(row, j) = rng.uniform(-0.05, 0.05);
    }
  }
  build.coverage = content > 0 ? static_cast<double>(found) / content : 0.0;
  return build;
}

// Fixed-length index sequences plus labels; entries past a sequence's true
// length hold pad_index.
struct EncodedBatch {
  int batch = 0;
  int max_len = 0;
  std::vector<int> sequences;  // row-major batch x max_len
  std::vector<int> labels;

  int& seq(int b, int t) { return sequences[static_cast<std::size_t>(b) * max_len + t]; }
  int seq(int b, int t) const { return sequences[static_cast<std::size_t>(b) * max_len + t]; }
};

}  // namespace olw
