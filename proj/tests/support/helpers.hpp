#pragma once

// Shared test utilities: a scratch-directory guard, a full-matrix edit
// distance kept independent of the library's rolling-row version, central
// finite-difference gradient checking, and a subprocess runner for driving
// the command-line binary.

#include <olw/nn/model.hpp>
#include <olw/rng.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace testutil {

class TempDir {
 public:
  TempDir() {
    static std::atomic<unsigned> counter{0};
    std::string tag = "olw_test_" + std::to_string(::getpid()) + "_" +
                      std::to_string(counter++);
    path_ = std::filesystem::temp_directory_path() / tag;
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string str() const { return path_.string(); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string line;
  std::istringstream in(text);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

struct CommandResult {
  int status = -1;
  std::string output;
};

// Runs through the shell with stderr folded into stdout.
inline CommandResult run_command(const std::string& cmd) {
  CommandResult result;
  std::string full = cmd + " 2>&1";
  FILE* pipe = ::popen(full.c_str(), "r");
  if (!pipe) return result;
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) {
    result.output.append(buf, n);
  }
  int rc = ::pclose(pipe);
  if (WIFEXITED(rc)) result.status = WEXITSTATUS(rc);
  return result;
}

// Optimal string alignment distance via the full dynamic-programming matrix.
inline long long osa_reference(const std::string& a, const std::string& b) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::vector<long long>> d(n + 1, std::vector<long long>(m + 1, 0));
  for (std::size_t i = 0; i <= n; ++i) d[i][0] = static_cast<long long>(i);
  for (std::size_t j = 0; j <= m; ++j) d[0][j] = static_cast<long long>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      long long cost = a[i - 1] == b[j - 1] ? 0 : 1;
      long long best = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                                 d[i - 1][j - 1] + cost});
      if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1]) {
        best = std::min(best, d[i - 2][j - 2] + 1);
      }
      d[i][j] = best;
    }
  }
  return d[n][m];
}

// Embedding matrix with a zero pad row and small random content rows,
// built directly so model tests need no vocabulary or lookup table.
inline olw::EmbeddingMatrix random_embedding(int vocab, int dim,
                                             unsigned long long seed) {
  olw::EmbeddingMatrix emb;
  emb.vocab_size = vocab;
  emb.dim = dim;
  emb.values.assign(static_cast<std::size_t>(vocab) * dim, 0.0);
  olw::Rng rng(seed);
  for (int r = 1; r < vocab; ++r) {
    for (int c = 0; c < dim; ++c) {
      emb.values[static_cast<std::size_t>(r) * dim + c] = rng.uniform(-0.2, 0.2);
    }
  }
  return emb;
}

// Model spec small enough for exhaustive finite-difference checks. Dropout
// is zeroed so repeated forward passes are deterministic.
inline olw::nn::ModelSpec tiny_spec(olw::nn::Variant variant, int classes = 2,
                                    unsigned long long seed = 3) {
  olw::nn::ModelSpec spec;
  spec.variant = variant;
  spec.embedding_dim = 4;
  spec.rnn_units = 3;
  spec.conv_filters = 3;
  spec.kernel_size = 2;
  spec.pool_size = 2;
  spec.dense_units = 4;
  spec.num_classes = classes;
  spec.spatial_dropout_rate = 0.0;
  spec.internal_rnn_dropout_rate = 0.0;
  spec.embedding_trainable = true;
  spec.seed = seed;
  return spec;
}

inline double model_loss(olw::nn::Model& model, const std::vector<int>& tokens,
                         int batch, int time, const std::vector<int>& labels,
                         const std::vector<double>& class_weights) {
  for (auto* p : model.params()) p->zero_grad();
  olw::Rng rng(0);
  return model.loss_and_gradients(tokens, batch, time, labels, class_weights, rng);
}

struct GradCheck {
  double max_error = 0.0;
  std::size_t components = 0;
  std::string worst_param;
};

// Central finite differences over every parameter component. Requires the
// model's dropout rates to be zero so the loss is a pure function of the
// parameters. Errors are relative with a floor of 1 on the denominator.
inline GradCheck check_model_gradients(olw::nn::Model& model,
                                       const std::vector<int>& tokens, int batch,
                                       int time, const std::vector<int>& labels,
                                       const std::vector<double>& class_weights,
                                       double h = 1e-5) {
  model_loss(model, tokens, batch, time, labels, class_weights);
  std::vector<olw::nn::Tensor> analytic;
  for (auto* p : model.params()) analytic.push_back(p->grad);

  GradCheck result;
  auto params = model.params();
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    olw::nn::Param& p = *params[pi];
    if (!p.trainable) continue;
    for (std::size_t j = 0; j < p.value.v.size(); ++j) {
      double saved = p.value.v[j];
      p.value.v[j] = saved + h;
      double up = model_loss(model, tokens, batch, time, labels, class_weights);
      p.value.v[j] = saved - h;
      double down = model_loss(model, tokens, batch, time, labels, class_weights);
      p.value.v[j] = saved;
      double fd = (up - down) / (2.0 * h);
      double a = analytic[pi].v[j];
      double err = std::abs(a - fd) / std::max({1.0, std::abs(a), std::abs(fd)});
      ++result.components;
      if (err > result.max_error) {
        result.max_error = err;
        result.worst_param = p.name;
      }
    }
  }
  return result;
}

}  // namespace testutil
