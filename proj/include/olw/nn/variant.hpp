#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "olw/errors.hpp"

namespace olw::nn {

// The 13 architecture variants. Hyphenated names list layers in data-flow
// order, so CNN-LSTM convolves first while LSTM-CNN convolves after the
// recurrent stack.
enum class Variant {
  CNN,
  LSTM,
  BiLSTM,
  GRU,
  BiGRU,
  CNN_LSTM,
  CNN_BiLSTM,
  CNN_GRU,
  CNN_BiGRU,
  LSTM_CNN,
  BiLSTM_CNN,
  GRU_CNN,
  BiGRU_CNN,
};

enum class RnnKind { none, lstm, gru };

inline const std::vector<Variant>& all_variants() {
  static const std::vector<Variant> order = {
      Variant::CNN,        Variant::LSTM,       Variant::BiLSTM,
      Variant::GRU,        Variant::BiGRU,      Variant::CNN_LSTM,
      Variant::CNN_BiLSTM, Variant::CNN_GRU,    Variant::CNN_BiGRU,
      Variant::LSTM_CNN,   Variant::BiLSTM_CNN, Variant::GRU_CNN,
      Variant::BiGRU_CNN,
  };
  return order;
}

inline std::string to_string(Variant v) {
  switch (v) {
    case Variant::CNN: return "CNN";
    case Variant::LSTM: return "LSTM";
    case Variant::BiLSTM: return "BiLSTM";
    case Variant::GRU: return "GRU";
    case Variant::BiGRU: return "BiGRU";
    case Variant::CNN_LSTM: return "CNN-LSTM";
    case Variant::CNN_BiLSTM: return "CNN-BiLSTM";
    case Variant::CNN_GRU: return "CNN-GRU";
    case Variant::CNN_BiGRU: return "CNN-BiGRU";
    case Variant::LSTM_CNN: return "LSTM-CNN";
    case Variant::BiLSTM_CNN: return "BiLSTM-CNN";
    case Variant::GRU_CNN: return "GRU-CNN";
    case Variant::BiGRU_CNN: return "BiGRU-CNN";
  }
  throw config_error("unreachable variant value");
}

inline Variant variant_from_string(const std::string& name) {
  for (Variant v : all_variants()) {
    if (to_string(v) == name) return v;
  }
  throw config_error("unknown model variant: " + name);
}

inline bool has_front_cnn(Variant v) {
  switch (v) {
    case Variant::CNN:
    case Variant::CNN_LSTM:
    case Variant::CNN_BiLSTM:
    case Variant::CNN_GRU:
    case Variant::CNN_BiGRU:
      return true;
    default:
      return false;
  }
}

inline bool has_back_cnn(Variant v) {
  switch (v) {
    case Variant::LSTM_CNN:
    case Variant::BiLSTM_CNN:
    case Variant::GRU_CNN:
    case Variant::BiGRU_CNN:
      return true;
    default:
      return false;
  }
}

inline RnnKind rnn_kind(Variant v) {
  switch (v) {
    case Variant::CNN:
      return RnnKind::none;
    case Variant::LSTM:
    case Variant::CNN_LSTM:
    case Variant::LSTM_CNN:
    case Variant::BiLSTM:
    case Variant::CNN_BiLSTM:
    case Variant::BiLSTM_CNN:
      return RnnKind::lstm;
    default:
      return RnnKind::gru;
  }
}

inline bool rnn_bidirectional(Variant v) {
  switch (v) {
    case Variant::BiLSTM:
    case Variant::BiGRU:
    case Variant::CNN_BiLSTM:
    case Variant::CNN_BiGRU:
    case Variant::BiLSTM_CNN:
    case Variant::BiGRU_CNN:
      return true;
    default:
      return false;
  }
}

// Declarative description of one model instance.
struct ModelSpec {
  Variant variant = Variant::BiLSTM_CNN;
  int embedding_dim = 100;
  int rnn_units = 100;
  int conv_filters = 64;
  int kernel_size = 3;
  int pool_size = 2;
  int dense_units = 64;
  int num_classes = 2;
  double spatial_dropout_rate = 0.20;
  double internal_rnn_dropout_rate = 0.35;
  bool embedding_trainable = true;
  std::uint64_t seed = 0;

  void validate() const {
    auto positive = [](int v, const char* what) {
      if (v < 1) throw config_error(std::string("ModelSpec: ") + what + " must be >= 1");
    };
    positive(embedding_dim, "embedding_dim");
    positive(rnn_units, "rnn_units");
    positive(conv_filters, "conv_filters");
    positive(kernel_size, "kernel_size");
    positive(pool_size, "pool_size");
    positive(dense_units, "dense_units");
    if (num_classes < 2) throw config_error("ModelSpec: num_classes must be >= 2");
    for (double r : {spatial_dropout_rate, internal_rnn_dropout_rate}) {
      if (r < 0.0 || r >= 1.0) {
        throw config_error("ModelSpec: dropout rates must lie in [0, 1)");
      }
    }
  }
};

}  // namespace olw::nn
