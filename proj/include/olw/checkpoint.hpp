#pragma once

#include <cerrno>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <string>
#include <vector>

#include "olw/config.hpp"
#include "olw/dataset.hpp"
#include "olw/errors.hpp"
#include "olw/nn/model.hpp"
#include "olw/nn/tensor.hpp"
#include "olw/nn/variant.hpp"
#include "olw/representation.hpp"
#include "olw/text_util.hpp"

namespace olw {

// A checkpoint is a directory holding:
//   manifest.txt  key = value description of the model and its inputs
//   tensors.bin   named parameter tensors, little-endian float64
//   vocab.txt     one token per line, in index order
// tensors.bin layout: magic "OLWT", u32 version, u32 tensor count, then per
// tensor: u32 name length, name bytes, u32 rank, u32 dims, f64 payload.

namespace detail {

inline void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t read_u32(std::istream& in, const std::string& what) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) {
    throw data_error("checkpoint: truncated while reading " + what);
  }
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

inline void write_f64(std::ostream& out, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, sizeof bits);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 8);
}

inline double read_f64(std::istream& in, const std::string& what) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) {
    throw data_error("checkpoint: truncated while reading " + what);
  }
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double d;
  std::memcpy(&d, &bits, sizeof d);
  return d;
}

// Seeds and hashes use the full 64-bit unsigned range, which get_int cannot
// represent.
inline std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  errno = 0;
  char* end = nullptr;
  unsigned long long v = std::strtoull(value.c_str(), &end, 10);
  if (errno != 0 || end == value.c_str() || *end != '\0' || value.front() == '-') {
    throw data_error("manifest key '" + key + "': '" + value +
                     "' is not an unsigned integer");
  }
  return static_cast<std::uint64_t>(v);
}

}  // namespace detail

inline void save_tensors(const std::string& path,
                         const std::vector<std::pair<std::string, const nn::Tensor*>>& tensors) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write tensor file: " + path);
  out.write("OLWT", 4);
  detail::write_u32(out, 1);
  detail::write_u32(out, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& [name, tensor] : tensors) {
    detail::write_u32(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    detail::write_u32(out, static_cast<std::uint32_t>(tensor->shape.size()));
    for (int d : tensor->shape) detail::write_u32(out, static_cast<std::uint32_t>(d));
    for (double v : tensor->v) detail::write_f64(out, v);
  }
  if (!out) throw data_error("write failure on tensor file: " + path);
}

inline std::map<std::string, nn::Tensor> load_tensors(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open tensor file: " + path);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "OLWT", 4) != 0) {
    throw data_error("tensor file has wrong magic: " + path);
  }
  std::uint32_t version = detail::read_u32(in, "version");
  if (version != 1) {
    throw data_error("unsupported tensor file version " + std::to_string(version));
  }
  std::uint32_t count = detail::read_u32(in, "tensor count");
  std::map<std::string, nn::Tensor> out;
  for (std::uint32_t i = 0; i < count; ++i) {
    std::uint32_t name_len = detail::read_u32(in, "name length");
    std::string name(name_len, '\0');
    if (!in.read(name.data(), name_len)) {
      throw data_error("checkpoint: truncated tensor name");
    }
    std::uint32_t rank = detail::read_u32(in, "rank of " + name);
    std::vector<int> shape;
    std::size_t total = 1;
    for (std::uint32_t r = 0; r < rank; ++r) {
      auto d = static_cast<int>(detail::read_u32(in, "dim of " + name));
      shape.push_back(d);
      total *= static_cast<std::size_t>(d);
    }
    nn::Tensor t(shape);
    for (std::size_t j = 0; j < total; ++j) t.v[j] = detail::read_f64(in, name);
    if (!out.emplace(name, std::move(t)).second) {
      throw data_error("duplicate tensor '" + name + "' in " + path);
    }
  }
  return out;
}

struct CheckpointMeta {
  nn::ModelSpec spec;
  Subtask subtask = Subtask::a;
  std::vector<std::string> class_names;
  int max_len = 50;
};

inline void save_checkpoint(const std::string& dir, nn::Model& model,
                            const Vocabulary& vocab, const CheckpointMeta& meta) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const nn::ModelSpec& s = meta.spec;

  std::ofstream manifest(fs::path(dir) / "manifest.txt");
  if (!manifest) throw data_error("cannot write manifest in " + dir);
  manifest << std::setprecision(17);
  manifest << "format_version = 1\n";
  manifest << "variant = " << nn::to_string(s.variant) << "\n";
  manifest << "subtask = " << to_string(meta.subtask) << "\n";
  manifest << "class_names = " << join(meta.class_names, ",") << "\n";
  manifest << "num_classes = " << s.num_classes << "\n";
  manifest << "embedding_dim = " << s.embedding_dim << "\n";
  manifest << "rnn_units = " << s.rnn_units << "\n";
  manifest << "conv_filters = " << s.conv_filters << "\n";
  manifest << "kernel_size = " << s.kernel_size << "\n";
  manifest << "pool_size = " << s.pool_size << "\n";
  manifest << "dense_units = " << s.dense_units << "\n";
  manifest << "spatial_dropout_rate = " << s.spatial_dropout_rate << "\n";
  manifest << "internal_rnn_dropout_rate = " << s.internal_rnn_dropout_rate << "\n";
  manifest << "embedding_trainable = " << (s.embedding_trainable ? "true" : "false") << "\n";
  manifest << "seed = " << s.seed << "\n";
  manifest << "max_len = " << meta.max_len << "\n";
  manifest << "vocab_hash = " << vocab.hash() << "\n";
  if (!manifest) throw data_error("write failure on manifest in " + dir);
  manifest.close();

  std::ofstream vf(fs::path(dir) / "vocab.txt");
  if (!vf) throw data_error("cannot write vocab in " + dir);
  for (const auto& tok : vocab.index_to_token) vf << tok << "\n";
  vf.close();

  std::vector<std::pair<std::string, const nn::Tensor*>> tensors;
  for (nn::Param* p : model.params()) tensors.emplace_back(p->name, &p->value);
  save_tensors((fs::path(dir) / "tensors.bin").string(), tensors);
}

struct LoadedCheckpoint {
  CheckpointMeta meta;
  Vocabulary vocab;
  nn::Model model;
};

inline LoadedCheckpoint load_checkpoint(const std::string& dir) {
  namespace fs = std::filesystem;
  Config manifest = Config::from_file((fs::path(dir) / "manifest.txt").string());
  if (manifest.get_int("format_version") != 1) {
    throw data_error("unsupported checkpoint format_version");
  }

  CheckpointMeta meta;
  nn::ModelSpec& s = meta.spec;
  s.variant = nn::variant_from_string(manifest.get_string("variant"));
  s.num_classes = static_cast<int>(manifest.get_int("num_classes"));
  s.embedding_dim = static_cast<int>(manifest.get_int("embedding_dim"));
  s.rnn_units = static_cast<int>(manifest.get_int("rnn_units"));
  s.conv_filters = static_cast<int>(manifest.get_int("conv_filters"));
  s.kernel_size = static_cast<int>(manifest.get_int("kernel_size"));
  s.pool_size = static_cast<int>(manifest.get_int("pool_size"));
  s.dense_units = static_cast<int>(manifest.get_int("dense_units"));
  s.spatial_dropout_rate = manifest.get_double("spatial_dropout_rate");
  s.internal_rnn_dropout_rate = manifest.get_double("internal_rnn_dropout_rate");
  s.embedding_trainable = manifest.get_bool("embedding_trainable");
  s.seed = detail::parse_u64("seed", manifest.get_string("seed"));
  meta.subtask = subtask_from_string(manifest.get_string("subtask"));
  meta.max_len = static_cast<int>(manifest.get_int("max_len"));
  meta.class_names = split_on(manifest.get_string("class_names"), ',');
  if (static_cast<int>(meta.class_names.size()) != s.num_classes) {
    throw data_error("manifest class_names count does not match num_classes");
  }

  Vocabulary vocab;
  std::ifstream vf(fs::path(dir) / "vocab.txt");
  if (!vf) throw data_error("cannot open vocab in checkpoint " + dir);
  std::string line;
  vocab.index_to_token.clear();
  while (std::getline(vf, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    vocab.index_to_token.push_back(line);
  }
  for (std::size_t i = 0; i < vocab.index_to_token.size(); ++i) {
    vocab.token_to_index[vocab.index_to_token[i]] = static_cast<int>(i);
  }
  if (vocab.size() < 2 || vocab.index_to_token[0] != Vocabulary::pad_token ||
      vocab.index_to_token[1] != Vocabulary::unk_token) {
    throw data_error("checkpoint vocab is missing the pad/unk sentinels");
  }
  std::uint64_t stored_hash =
      detail::parse_u64("vocab_hash", manifest.get_string("vocab_hash"));
  if (vocab.hash() != stored_hash) {
    throw data_error("checkpoint vocab hash mismatch (manifest " +
                     std::to_string(stored_hash) + ", recomputed " +
                     std::to_string(vocab.hash()) + ")");
  }

  auto tensors = load_tensors((fs::path(dir) / "tensors.bin").string());
  auto emb_it = tensors.find("embedding");
  if (emb_it == tensors.end()) throw data_error("checkpoint has no embedding tensor");
  const nn::Tensor& emb = emb_it->second;
  if (emb.shape.size() != 2 || emb.shape[0] != static_cast<int>(vocab.size()) ||
      emb.shape[1] != s.embedding_dim) {
    throw data_error("embedding tensor shape does not match manifest");
  }
  EmbeddingMatrix matrix;
  matrix.vocab_size = emb.shape[0];
  matrix.dim = emb.shape[1];
  matrix.values = emb.v;

  nn::Model model(s, matrix);
  for (nn::Param* p : model.params()) {
    auto it = tensors.find(p->name);
    if (it == tensors.end()) {
      throw data_error("checkpoint is missing tensor '" + p->name + "'");
    }
    if (it->second.shape != p->value.shape) {
      throw data_error("checkpoint tensor '" + p->name + "' has wrong shape");
    }
    p->value = std::move(it->second);
    tensors.erase(it);
  }
  if (!tensors.empty()) {
    throw data_error("checkpoint has unexpected tensor '" + tensors.begin()->first + "'");
  }
  return LoadedCheckpoint{meta, std::move(vocab), std::move(model)};
}

}  // namespace olw
