#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "olw/errors.hpp"
#include "olw/nn/layers.hpp"
#include "olw/nn/tensor.hpp"
#include "olw/nn/variant.hpp"
#include "olw/representation.hpp"
#include "olw/rng.hpp"

namespace olw::nn {

// A classification network assembled from a ModelSpec. Data flow:
//   token ids -> embedding -> [conv+pool when the CNN comes first]
//   -> [recurrent layer] -> [conv+pool when the CNN comes after]
//   -> spatial dropout -> readout -> dense relu -> dense -> softmax.
// The readout takes the final timestep, except for the standalone CNN which
// takes a global max over time (its dropout then acts on that vector).
class Model {
 public:
  Model(const ModelSpec& spec, const EmbeddingMatrix& embeddings)
      : spec_(spec) {
    spec_.validate();
    if (embeddings.dim != spec_.embedding_dim) {
      throw config_error("embedding matrix dim " + std::to_string(embeddings.dim) +
                         " does not match spec embedding_dim " +
                         std::to_string(spec_.embedding_dim));
    }
    Tensor table({embeddings.vocab_size, embeddings.dim});
    table.v = embeddings.values;
    embedding_ = std::make_unique<EmbeddingLayer>(std::move(table),
                                                  spec_.embedding_trainable);

    // Parameter initialisation draws from a single stream in layer order.
    Rng init(spec_.seed);
    int channels = spec_.embedding_dim;
    if (has_front_cnn(spec_.variant)) {
      conv_front_ = std::make_unique<Conv1DLayer>(spec_.conv_filters,
                                                  spec_.kernel_size, channels, init);
      conv_front_->kernels().name = "conv_front.kernels";
      conv_front_->bias().name = "conv_front.bias";
      pool_front_ = std::make_unique<MaxPool1DLayer>(spec_.pool_size);
      channels = spec_.conv_filters;
    }
    if (rnn_kind(spec_.variant) != RnnKind::none) {
      CellKind kind = rnn_kind(spec_.variant) == RnnKind::lstm ? CellKind::lstm
                                                               : CellKind::gru;
      rnn_ = std::make_unique<RecurrentLayer>(kind, spec_.rnn_units, channels,
                                              rnn_bidirectional(spec_.variant),
                                              spec_.internal_rnn_dropout_rate, init);
      channels = rnn_->output_channels();
    }
    if (has_back_cnn(spec_.variant)) {
      conv_back_ = std::make_unique<Conv1DLayer>(spec_.conv_filters,
                                                 spec_.kernel_size, channels, init);
      conv_back_->kernels().name = "conv_back.kernels";
      conv_back_->bias().name = "conv_back.bias";
      pool_back_ = std::make_unique<MaxPool1DLayer>(spec_.pool_size);
      channels = spec_.conv_filters;
    }
    dropout_ = std::make_unique<SpatialDropoutLayer>(spec_.spatial_dropout_rate);
    dense_ = std::make_unique<DenseLayer>("dense", spec_.dense_units, channels,
                                          /*relu=*/true, init);
    output_ = std::make_unique<DenseLayer>("output", spec_.num_classes,
                                           spec_.dense_units, /*relu=*/false, init);
  }

  const ModelSpec& spec() const { return spec_; }

  std::vector<std::string> layer_names() const {
    std::vector<std::string> names{"Embedding"};
    if (conv_front_) {
      names.push_back("Conv1D");
      names.push_back("MaxPool1D");
    }
    if (rnn_) {
      RnnKind k = rnn_kind(spec_.variant);
      bool bi = rnn_bidirectional(spec_.variant);
      names.push_back(k == RnnKind::lstm ? (bi ? "BiLSTM" : "LSTM")
                                         : (bi ? "BiGRU" : "GRU"));
    }
    if (conv_back_) {
      names.push_back("Conv1D");
      names.push_back("MaxPool1D");
    }
    names.push_back("SpatialDropout");
    names.push_back("Dense");
    names.push_back("Output");
    return names;
  }

  std::vector<Param*> params() {
    std::vector<Param*> out{&embedding_->param()};
    if (conv_front_) {
      out.push_back(&conv_front_->kernels());
      out.push_back(&conv_front_->bias());
    }
    if (rnn_) {
      for (Param* p : rnn_->params()) out.push_back(p);
    }
    if (conv_back_) {
      out.push_back(&conv_back_->kernels());
      out.push_back(&conv_back_->bias());
    }
    out.push_back(&dense_->weights());
    out.push_back(&dense_->bias());
    out.push_back(&output_->weights());
    out.push_back(&output_->bias());
    return out;
  }

  std::vector<Tensor> snapshot() {
    std::vector<Tensor> out;
    for (Param* p : params()) out.push_back(p->value);
    return out;
  }

  void restore(const std::vector<Tensor>& snap) {
    auto ps = params();
    if (snap.size() != ps.size()) throw config_error("snapshot size mismatch");
    for (std::size_t i = 0; i < ps.size(); ++i) {
      if (snap[i].shape != ps[i]->value.shape) {
        throw config_error("snapshot shape mismatch for " + ps[i]->name);
      }
      ps[i]->value = snap[i];
    }
  }

  // Returns class probabilities, shape [batch, num_classes]. Dropout masks
  // are drawn from dropout_rng only when training is true.
  Tensor forward(const std::vector<int>& tokens, int batch, int time,
                 bool training, Rng& dropout_rng) {
    Tensor x = embedding_->forward(tokens, batch, time);
    if (conv_front_) x = pool_front_->forward(conv_front_->forward(x));
    if (rnn_) x = rnn_->forward(x, training, dropout_rng);
    if (conv_back_) x = pool_back_->forward(conv_back_->forward(x));
    Tensor vec;
    if (spec_.variant == Variant::CNN) {
      vec = global_max_.forward(x);
      vec = dropout_->forward(vec, training, dropout_rng);
    } else {
      x = dropout_->forward(x, training, dropout_rng);
      vec = take_last_.forward(x);
    }
    Tensor logits = output_->forward(dense_->forward(vec));
    return softmax_rows(logits);
  }

  // One forward/backward pass. Accumulates parameter gradients (callers zero
  // them first) and returns the weighted cross entropy.
  double loss_and_gradients(const std::vector<int>& tokens, int batch, int time,
                            const std::vector<int>& labels,
                            const std::vector<double>& class_weights,
                            Rng& dropout_rng) {
    Tensor probs = forward(tokens, batch, time, /*training=*/true, dropout_rng);
    double loss = weighted_cross_entropy(probs, labels, class_weights);

    // d(loss)/d(logit) = (p - onehot) * weight[label] / batch
    Tensor dlogits(probs.shape);
    for (int b = 0; b < batch; ++b) {
      int y = labels[static_cast<std::size_t>(b)];
      double w = class_weights[static_cast<std::size_t>(y)] / batch;
      for (int c = 0; c < spec_.num_classes; ++c) {
        dlogits.at(b, c) = (probs.at(b, c) - (c == y ? 1.0 : 0.0)) * w;
      }
    }

    Tensor d = dense_->backward(output_->backward(dlogits));
    if (spec_.variant == Variant::CNN) {
      d = global_max_.backward(dropout_->backward(d));
    } else {
      d = dropout_->backward(take_last_.backward(d));
    }
    if (conv_back_) d = conv_back_->backward(pool_back_->backward(d));
    if (rnn_) d = rnn_->backward(d);
    if (conv_front_) d = conv_front_->backward(pool_front_->backward(d));
    embedding_->backward(d);
    return loss;
  }

  std::vector<int> predict(const std::vector<int>& tokens, int batch, int time) {
    Rng unused(0);
    Tensor probs = forward(tokens, batch, time, /*training=*/false, unused);
    std::vector<int> labels(static_cast<std::size_t>(batch));
    for (int b = 0; b < batch; ++b) {
      int best = 0;
      for (int c = 1; c < spec_.num_classes; ++c) {
        if (probs.at(b, c) > probs.at(b, best)) best = c;
      }
      labels[static_cast<std::size_t>(b)] = best;
    }
    return labels;
  }

 private:
  ModelSpec spec_;
  std::unique_ptr<EmbeddingLayer> embedding_;
  std::unique_ptr<Conv1DLayer> conv_front_, conv_back_;
  std::unique_ptr<MaxPool1DLayer> pool_front_, pool_back_;
  std::unique_ptr<RecurrentLayer> rnn_;
  std::unique_ptr<SpatialDropoutLayer> dropout_;
  TakeLastTimestep take_last_;
  GlobalMaxOverTime global_max_;
  std::unique_ptr<DenseLayer> dense_, output_;
};

inline Model build_model(const ModelSpec& spec, const EmbeddingMatrix& embeddings) {
  return Model(spec, embeddings);
}

}  // namespace olw::nn
