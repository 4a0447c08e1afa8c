#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "olw/errors.hpp"
#include "olw/nn/tensor.hpp"
#include "olw/rng.hpp"

namespace olw::nn {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// ---------------------------------------------------------------------------
// embedding
// ---------------------------------------------------------------------------

class EmbeddingLayer {
 public:
  EmbeddingLayer(Tensor table, bool trainable)
      : table_("embedding", std::move(table), trainable) {}

  int vocab_size() const { return table_.value.shape[0]; }
  int dim() const { return table_.value.shape[1]; }
  Param& param() { return table_; }

  // tokens: row-major batch x time indices into the table.
  Tensor forward(const std::vector<int>& tokens, int batch, int time) {
    tokens_ = tokens;
    batch_ = batch;
    time_ = time;
    Tensor out({batch, time, dim()});
    for (int b = 0; b < batch; ++b) {
      for (int t = 0; t < time; ++t) {
        int row = tokens[static_cast<std::size_t>(b) * time + t];
        for (int j = 0; j < dim(); ++j) out.at(b, t, j) = table_.value.at(row, j);
      }
    }
    return out;
  }

  void backward(const Tensor& dout) {
    if (!table_.trainable) return;
    for (int b = 0; b < batch_; ++b) {
      for (int t = 0; t < time_; ++t) {
        int row = tokens_[static_cast<std::size_t>(b) * time_ + t];
        for (int j = 0; j < dim(); ++j) table_.grad.at(row, j) += dout.at(b, t, j);
      }
    }
  }

 private:
  Param table_;
  std::vector<int> tokens_;
  int batch_ = 0, time_ = 0;
};

// ---------------------------------------------------------------------------
// convolution + pooling
// ---------------------------------------------------------------------------

// Valid (no padding) cross-correlation along time followed by ReLU.
class Conv1DLayer {
 public:
  Conv1DLayer(int filters, int width, int in_channels, Rng& init)
      : filters_(filters), width_(width), in_channels_(in_channels),
        kernels_("conv.kernels", Tensor({filters, width, in_channels})),
        bias_("conv.bias", Tensor({filters})) {
    double bound = std::sqrt(6.0 / (width * in_channels + filters));
    for (double& w : kernels_.value.v) w = init.uniform(-bound, bound);
  }

  Param& kernels() { return kernels_; }
  Param& bias() { return bias_; }

  Tensor forward(const Tensor& in) {
    const int batch = in.shape[0], time = in.shape[1];
    if (time < width_) {
      throw config_error("conv1d: sequence length " + std::to_string(time) +
                         " shorter than kernel width " + std::to_string(width_));
    }
    input_ = in;
    const int out_time = time - width_ + 1;
    Tensor out({batch, out_time, filters_});
    active_.assign(out.size(), false);
    std::size_t idx = 0;
    for (int b = 0; b < batch; ++b) {
      for (int t = 0; t < out_time; ++t) {
        for (int k = 0; k < filters_; ++k, ++idx) {
          double acc = bias_.value[static_cast<std::size_t>(k)];
          for (int dw = 0; dw < width_; ++dw) {
            for (int c = 0; c < in_channels_; ++c) {
              acc += in.at(b, t + dw, c) * kernels_.value.at(k, dw, c);
            }
          }
          if (acc > 0.0) {
            out.v[idx] = acc;
            active_[idx] = true;
          }
        }
      }
    }
    return out;
  }

  Tensor backward(const Tensor& dout) {
    const int batch = input_.shape[0], time = input_.shape[1];
    const int out_time = dout.shape[1];
    Tensor din(input_.shape);
    std::size_t idx = 0;
    for (int b = 0; b < batch; ++b) {
      for (int t = 0; t < out_time; ++t) {
        for (int k = 0; k < filters_; ++k, ++idx) {
          if (!active_[idx]) continue;
          double g = dout.v[idx];
          bias_.grad[static_cast<std::size_t>(k)] += g;
          for (int dw = 0; dw < width_; ++dw) {
            for (int c = 0; c < in_channels_; ++c) {
              kernels_.grad.at(k, dw, c) += g * input_.at(b, t + dw, c);
              din.at(b, t + dw, c) += g * kernels_.value.at(k, dw, c);
            }
          }
        }
      }
    }
    (void)time;
    return din;
  }

 private:
  int filters_, width_, in_channels_;
  Param kernels_, bias_;
  Tensor input_;
  std::vector<char> active_;
};

// Non-overlapping max pooling along time; remainder timesteps are dropped.
// The gradient routes to the first argmax of each window.
class MaxPool1DLayer {
 public:
  explicit MaxPool1DLayer(int pool) : pool_(pool) {}

  Tensor forward(const Tensor& in) {
    const int batch = in.shape[0], time = in.shape[1], ch = in.shape[2];
    if (time < pool_) {
      throw config_error("maxpool1d: sequence length " + std::to_string(time) +
                         " shorter than pool size " + std::to_string(pool_));
    }
    in_shape_ = in.shape;
    const int out_time = time / pool_;
    Tensor out({batch, out_time, ch});
    argmax_.assign(out.size(), 0);
    for (int b = 0; b < batch; ++b) {
      for (int w = 0; w < out_time; ++w) {
        for (int c = 0; c < ch; ++c) {
          int best_t = w * pool_;
          double best = in.at(b, best_t, c);
          for (int t = w * pool_ + 1; t < (w + 1) * pool_; ++t) {
            if (in.at(b, t, c) > best) {
              best = in.at(b, t, c);
              best_t = t;
            }
          }
          out.at(b, w, c) = best;
          argmax_[(static_cast<std::size_t>(b) * out_time + w) * ch + c] = best_t;
        }
      }
    }
    return out;
  }

  Tensor backward(const Tensor& dout) {
    Tensor din(in_shape_);
    const int batch = dout.shape[0], out_time = dout.shape[1], ch = dout.shape[2];
    for (int b = 0; b < batch; ++b) {
      for (int w = 0; w < out_time; ++w) {
        for (int c = 0; c < ch; ++c) {
          int t = argmax_[(static_cast<std::size_t>(b) * out_time + w) * ch + c];
          din.at(b, t, c) += dout.at(b, w, c);
        }
      }
    }
    return din;
  }

 private:
  int pool_;
  std::vector<int> in_shape_;
  std::vector<int> argmax_;
};

// ---------------------------------------------------------------------------
// recurrent cells
// ---------------------------------------------------------------------------
// Weight layout: wx is [gates*H, C], wh is [gates*H, H], bias [gates*H].
// LSTM gate blocks in row order: input, forget, candidate, output.
// GRU gate blocks in row order: update, reset, candidate.

struct LstmState {
  std::vector<double> h, c;
};

namespace detail {

inline void gate_preactivations(const Tensor& wx, const Tensor& wh,
                                const Tensor& bias, const double* x,
                                const double* h, std::vector<double>& pre) {
  const int rows = wx.shape[0], in = wx.shape[1], hidden = wh.shape[1];
  pre.assign(static_cast<std::size_t>(rows), 0.0);
  for (int r = 0; r < rows; ++r) {
    double acc = bias[static_cast<std::size_t>(r)];
    for (int c = 0; c < in; ++c) acc += wx.at(r, c) * x[c];
    for (int c = 0; c < hidden; ++c) acc += wh.at(r, c) * h[c];
    pre[static_cast<std::size_t>(r)] = acc;
  }
}

}  // namespace detail

// Standard gated step: i,f,o = sigmoid, g = tanh, c' = f.c + i.g,
// h' = o.tanh(c').
inline LstmState lstm_cell_step(const Tensor& wx, const Tensor& wh,
                                const Tensor& bias, const std::vector<double>& x,
                                const LstmState& prev) {
  const int hidden = wh.shape[1];
  std::vector<double> pre;
  detail::gate_preactivations(wx, wh, bias, x.data(), prev.h.data(), pre);
  LstmState next;
  next.h.resize(static_cast<std::size_t>(hidden));
  next.c.resize(static_cast<std::size_t>(hidden));
  for (int u = 0; u < hidden; ++u) {
    double i = sigmoid(pre[u]);
    double f = sigmoid(pre[hidden + u]);
    double g = std::tanh(pre[2 * hidden + u]);
    double o = sigmoid(pre[3 * hidden + u]);
    next.c[u] = f * prev.c[u] + i * g;
    next.h[u] = o * std::tanh(next.c[u]);
  }
  return next;
}

// z,r = sigmoid, candidate = tanh(wx_g.x + wh_g.(r.h) + b_g),
// h' = (1-z).h + z.candidate.
inline std::vector<double> gru_cell_step(const Tensor& wx, const Tensor& wh,
                                         const Tensor& bias,
                                         const std::vector<double>& x,
                                         const std::vector<double>& h) {
  const int hidden = wh.shape[1];
  const int in = wx.shape[1];
  std::vector<double> next(static_cast<std::size_t>(hidden));
  std::vector<double> z(hidden), r(hidden);
  for (int u = 0; u < hidden; ++u) {
    double acc_z = bias[static_cast<std::size_t>(u)];
    double acc_r = bias[static_cast<std::size_t>(hidden + u)];
    for (int c = 0; c < in; ++c) {
      acc_z += wx.at(u, c) * x[c];
      acc_r += wx.at(hidden + u, c) * x[c];
    }
    for (int c = 0; c < hidden; ++c) {
      acc_z += wh.at(u, c) * h[c];
      acc_r += wh.at(hidden + u, c) * h[c];
    }
    z[u] = sigmoid(acc_z);
    r[u] = sigmoid(acc_r);
  }
  for (int u = 0; u < hidden; ++u) {
    double acc = bias[static_cast<std::size_t>(2 * hidden + u)];
    for (int c = 0; c < in; ++c) acc += wx.at(2 * hidden + u, c) * x[c];
    for (int c = 0; c < hidden; ++c) acc += wh.at(2 * hidden + u, c) * (r[c] * h[c]);
    next[u] = (1.0 - z[u]) * h[u] + z[u] * std::tanh(acc);
  }
  return next;
}

// ---------------------------------------------------------------------------
// recurrent layer (unrolled, optional bidirectional)
// ---------------------------------------------------------------------------

enum class CellKind { lstm, gru };

class RecurrentLayer {
 public:
  // Input dropout is applied to the non-recurrent inputs only, with one mask
  // per (sample, input channel) held fixed across timesteps, scaled by
  // 1/(1-rate). Padded positions are processed like any other (no masking).
  RecurrentLayer(CellKind kind, int units, int in_channels, bool bidirectional,
                 double input_dropout, Rng& init)
      : kind_(kind), units_(units), in_channels_(in_channels),
        bidirectional_(bidirectional), input_dropout_(input_dropout) {
    const int gates = kind == CellKind::lstm ? 4 : 3;
    const int dirs = bidirectional ? 2 : 1;
    for (int d = 0; d < dirs; ++d) {
      std::string prefix = dirs == 1 ? "rnn." : (d == 0 ? "rnn.fwd." : "rnn.bwd.");
      Direction dir;
      dir.wx = Param(prefix + "wx", Tensor({gates * units, in_channels}));
      dir.wh = Param(prefix + "wh", Tensor({gates * units, units}));
      dir.bias = Param(prefix + "bias", Tensor({gates * units}));
      for (double& w : dir.wx.value.v) w = init.uniform(-0.05, 0.05);
      for (double& w : dir.wh.value.v) w = init.uniform(-0.05, 0.05);
      dirs_.push_back(std::move(dir));
    }
  }

  int output_channels() const { return bidirectional_ ? 2 * units_ : units_; }

  std::vector<Param*> params() {
    std::vector<Param*> out;
    for (auto& d : dirs_) {
      out.push_back(&d.wx);
      out.push_back(&d.wh);
      out.push_back(&d.bias);
    }
    return out;
  }

  Tensor forward(const Tensor& in, bool training, Rng& dropout_rng) {
    const int batch = in.shape[0], time = in.shape[1];
    batch_ = batch;
    time_ = time;
    Tensor out({batch, time, output_channels()});
    for (std::size_t d = 0; d < dirs_.size(); ++d) {
      draw_dropout_mask(dirs_[d], batch, training, dropout_rng);
      run_direction(dirs_[d], in, d == 1, out, static_cast<int>(d) * units_);
    }
    return out;
  }

  Tensor backward(const Tensor& dout) {
    Tensor din({batch_, time_, in_channels_});
    for (std::size_t d = 0; d < dirs_.size(); ++d) {
      backward_direction(dirs_[d], dout, d == 1, static_cast<int>(d) * units_, din);
    }
    return din;
  }

 private:
  struct StepCache {
    std::vector<double> x;       // input after dropout
    std::vector<double> h_prev;
    std::vector<double> c_prev;  // lstm only
    std::vector<double> gates;   // post-activation gate values
    std::vector<double> c;       // lstm: new cell state
    std::vector<double> rh;      // gru: r .* h_prev
  };

  struct Direction {
    Param wx, wh, bias;
    Tensor mask;                        // [batch, in_channels] dropout mask
    std::vector<std::vector<StepCache>> cache;  // [batch][time]
  };

  void draw_dropout_mask(Direction& dir, int batch, bool training, Rng& rng) {
    dir.mask = Tensor({batch, in_channels_});
    if (!training || input_dropout_ <= 0.0) {
      dir.mask.fill(1.0);
      return;
    }
    const double keep = 1.0 - input_dropout_;
    for (double& m : dir.mask.v) m = rng.uniform() < keep ? 1.0 / keep : 0.0;
  }

  void run_direction(Direction& dir, const Tensor& in, bool reversed,
                     Tensor& out, int out_offset) {
    const int batch = in.shape[0], time = in.shape[1];
    const int gates = kind_ == CellKind::lstm ? 4 : 3;
    dir.cache.assign(static_cast<std::size_t>(batch), {});
    std::vector<double> pre;
    for (int b = 0; b < batch; ++b) {
      dir.cache[b].resize(static_cast<std::size_t>(time));
      std::vector<double> h(static_cast<std::size_t>(units_), 0.0);
      std::vector<double> c(static_cast<std::size_t>(units_), 0.0);
      for (int step = 0; step < time; ++step) {
        const int t = reversed ? time - 1 - step : step;
        StepCache& sc = dir.cache[b][t];
        sc.x.resize(static_cast<std::size_t>(in_channels_));
        for (int ch = 0; ch < in_channels_; ++ch) {
          sc.x[ch] = in.at(b, t, ch) * dir.mask.at(b, ch);
        }
        sc.h_prev = h;
        if (kind_ == CellKind::lstm) {
          sc.c_prev = c;
          detail::gate_preactivations(dir.wx.value, dir.wh.value, dir.bias.value,
                                      sc.x.data(), h.data(), pre);
          sc.gates.resize(static_cast<std::size_t>(4 * units_));
          sc.c.resize(static_cast<std::size_t>(units_));
          for (int u = 0; u < units_; ++u) {
            double i = sigmoid(pre[u]);
            double f = sigmoid(pre[units_ + u]);
            double g = std::tanh(pre[2 * units_ + u]);
            double o = sigmoid(pre[3 * units_ + u]);
            sc.gates[u] = i;
            sc.gates[units_ + u] = f;
            sc.gates[2 * units_ + u] = g;
            sc.gates[3 * units_ + u] = o;
            c[u] = f * sc.c_prev[u] + i * g;
            sc.c[u] = c[u];
            h[u] = o * std::tanh(c[u]);
          }
        } else {
          sc.gates.resize(static_cast<std::size_t>(3 * units_));
          sc.rh.resize(static_cast<std::size_t>(units_));
          // update + reset gates
          for (int u = 0; u < 2 * units_; ++u) {
            double acc = dir.bias.value[static_cast<std::size_t>(u)];
            for (int ch = 0; ch < in_channels_; ++ch) acc += dir.wx.value.at(u, ch) * sc.x[ch];
            for (int ch = 0; ch < units_; ++ch) acc += dir.wh.value.at(u, ch) * h[ch];
            sc.gates[u] = sigmoid(acc);
          }
          for (int u = 0; u < units_; ++u) sc.rh[u] = sc.gates[units_ + u] * h[u];
          for (int u = 0; u < units_; ++u) {
            const int row = 2 * units_ + u;
            double acc = dir.bias.value[static_cast<std::size_t>(row)];
            for (int ch = 0; ch < in_channels_; ++ch) acc += dir.wx.value.at(row, ch) * sc.x[ch];
            for (int ch = 0; ch < units_; ++ch) acc += dir.wh.value.at(row, ch) * sc.rh[ch];
            sc.gates[2 * units_ + u] = std::tanh(acc);
          }
          for (int u = 0; u < units_; ++u) {
            double z = sc.gates[u];
            h[u] = (1.0 - z) * sc.h_prev[u] + z * sc.gates[2 * units_ + u];
          }
        }
        for (int u = 0; u < units_; ++u) {
          if (!std::isfinite(h[u])) {
            throw numeric_error("recurrent state became non-finite at timestep " +
                                std::to_string(t));
          }
          out.at(b, t, out_offset + u) = h[u];
        }
        (void)gates;
      }
    }
  }

  void backward_direction(Direction& dir, const Tensor& dout, bool reversed,
                          int out_offset, Tensor& din) {
    const int batch = batch_, time = time_;
    for (int b = 0; b < batch; ++b) {
      std::vector<double> dh_next(static_cast<std::size_t>(units_), 0.0);
      std::vector<double> dc_next(static_cast<std::size_t>(units_), 0.0);
      for (int step = time - 1; step >= 0; --step) {
        // reverse of the processing order
        const int t = reversed ? time - 1 - step : step;
        const StepCache& sc = dir.cache[b][t];
        std::vector<double> dh(static_cast<std::size_t>(units_));
        for (int u = 0; u < units_; ++u) dh[u] = dout.at(b, t, out_offset + u) + dh_next[u];

        std::vector<double> dpre;
        if (kind_ == CellKind::lstm) {
          dpre.assign(static_cast<std::size_t>(4 * units_), 0.0);
          for (int u = 0; u < units_; ++u) {
            double i = sc.gates[u], f = sc.gates[units_ + u];
            double g = sc.gates[2 * units_ + u], o = sc.gates[3 * units_ + u];
            double tc = std::tanh(sc.c[u]);
            double dO = dh[u] * tc;
            double dc = dh[u] * o * (1.0 - tc * tc) + dc_next[u];
            double dI = dc * g;
            double dF = dc * sc.c_prev[u];
            double dG = dc * i;
            dc_next[u] = dc * f;
            dpre[u] = dI * i * (1.0 - i);
            dpre[units_ + u] = dF * f * (1.0 - f);
            dpre[2 * units_ + u] = dG * (1.0 - g * g);
            dpre[3 * units_ + u] = dO * o * (1.0 - o);
          }
          std::fill(dh_next.begin(), dh_next.end(), 0.0);
          accumulate_grads(dir, sc, dpre, sc.h_prev, dh_next, din, b, t);
        } else {
          dpre.assign(static_cast<std::size_t>(3 * units_), 0.0);
          std::vector<double> dh_prev(static_cast<std::size_t>(units_), 0.0);
          for (int u = 0; u < units_; ++u) {
            double z = sc.gates[u];
            double g = sc.gates[2 * units_ + u];
            double dz = dh[u] * (g - sc.h_prev[u]);
            double dg = dh[u] * z;
            dh_prev[u] += dh[u] * (1.0 - z);
            dpre[u] = dz * z * (1.0 - z);
            dpre[2 * units_ + u] = dg * (1.0 - g * g);
          }
          // candidate depends on rh = r .* h_prev via wh rows [2H, 3H)
          std::vector<double> drh(static_cast<std::size_t>(units_), 0.0);
          for (int u = 0; u < units_; ++u) {
            const int row = 2 * units_ + u;
            double g = dpre[2 * units_ + u];
            for (int ch = 0; ch < units_; ++ch) drh[ch] += dir.wh.value.at(row, ch) * g;
          }
          for (int u = 0; u < units_; ++u) {
            double r = sc.gates[units_ + u];
            double dr = drh[u] * sc.h_prev[u];
            dh_prev[u] += drh[u] * r;
            dpre[units_ + u] = dr * r * (1.0 - r);
          }
          // update/reset preactivations also feed back into h_prev
          for (int u = 0; u < 2 * units_; ++u) {
            double g = dpre[u];
            for (int ch = 0; ch < units_; ++ch) dh_prev[ch] += dir.wh.value.at(u, ch) * g;
          }
          dh_next = dh_prev;
          accumulate_gru_grads(dir, sc, dpre, din, b, t);
        }
      }
    }
  }

  // Shared LSTM accumulation: wx/wh/bias grads, input grad, dh_next via wh.
  void accumulate_grads(Direction& dir, const StepCache& sc,
                        const std::vector<double>& dpre,
                        const std::vector<double>& h_prev,
                        std::vector<double>& dh_next, Tensor& din, int b, int t) {
    const int rows = static_cast<int>(dpre.size());
    for (int r = 0; r < rows; ++r) {
      double g = dpre[r];
      if (g == 0.0) continue;
      dir.bias.grad[static_cast<std::size_t>(r)] += g;
      for (int ch = 0; ch < in_channels_; ++ch) {
        dir.wx.grad.at(r, ch) += g * sc.x[ch];
        din.at(b, t, ch) += g * dir.wx.value.at(r, ch) * dir.mask.at(b, ch);
      }
      for (int ch = 0; ch < units_; ++ch) {
        dir.wh.grad.at(r, ch) += g * h_prev[ch];
        dh_next[ch] += dir.wh.value.at(r, ch) * g;
      }
    }
  }

  void accumulate_gru_grads(Direction& dir, const StepCache& sc,
                            const std::vector<double>& dpre, Tensor& din,
                            int b, int t) {
    const int rows = 3 * units_;
    for (int r = 0; r < rows; ++r) {
      double g = dpre[r];
      if (g == 0.0) continue;
      dir.bias.grad[static_cast<std::size_t>(r)] += g;
      for (int ch = 0; ch < in_channels_; ++ch) {
        dir.wx.grad.at(r, ch) += g * sc.x[ch];
        din.at(b, t, ch) += g * dir.wx.value.at(r, ch) * dir.mask.at(b, ch);
      }
      const bool candidate = r >= 2 * units_;
      // candidate rows multiply rh, gate rows multiply h_prev; the h_prev
      // chain contribution was already handled in backward_direction.
      const std::vector<double>& hvec = candidate ? sc.rh : sc.h_prev;
      for (int ch = 0; ch < units_; ++ch) dir.wh.grad.at(r, ch) += g * hvec[ch];
    }
  }

  CellKind kind_;
  int units_, in_channels_;
  bool bidirectional_;
  double input_dropout_;
  std::vector<Direction> dirs_;
  int batch_ = 0, time_ = 0;
};

// ---------------------------------------------------------------------------
// dropout
// ---------------------------------------------------------------------------

// Zeroes whole feature channels: one Bernoulli(1-rate) draw per
// (sample, channel), broadcast across all timesteps, survivors scaled by
// 1/(1-rate). Identity at inference. Accepts [B,T,K] or [B,K] input.
class SpatialDropoutLayer {
 public:
  explicit SpatialDropoutLayer(double rate) : rate_(rate) {}

  Tensor forward(const Tensor& in, bool training, Rng& rng) {
    shape_ = in.shape;
    const int batch = in.shape[0];
    const int ch = in.shape.back();
    const int time = in.shape.size() == 3 ? in.shape[1] : 1;
    if (!training || rate_ <= 0.0) {
      mask_ = Tensor({batch, ch});
      mask_.fill(1.0);
      return in;
    }
    const double keep = 1.0 - rate_;
    mask_ = Tensor({batch, ch});
    for (double& m : mask_.v) m = rng.uniform() < keep ? 1.0 / keep : 0.0;
    Tensor out = in;
    for (int b = 0; b < batch; ++b) {
      for (int t = 0; t < time; ++t) {
        for (int c = 0; c < ch; ++c) {
          out.v[(static_cast<std::size_t>(b) * time + t) * ch + c] *= mask_.at(b, c);
        }
      }
    }
    return out;
  }

  Tensor backward(const Tensor& dout) {
    const int batch = shape_[0];
    const int ch = shape_.back();
    const int time = shape_.size() == 3 ? shape_[1] : 1;
    Tensor din = dout;
    for (int b = 0; b < batch; ++b) {
      for (int t = 0; t < time; ++t) {
        for (int c = 0; c < ch; ++c) {
          din.v[(static_cast<std::size_t>(b) * time + t) * ch + c] *= mask_.at(b, c);
        }
      }
    }
    return din;
  }

 private:
  double rate_;
  std::vector<int> shape_;
  Tensor mask_;
};

// ---------------------------------------------------------------------------
// readouts: sequence -> vector
// ---------------------------------------------------------------------------

class TakeLastTimestep {
 public:
  Tensor forward(const Tensor& in) {
    shape_ = in.shape;
    const int batch = in.shape[0], time = in.shape[1], ch = in.shape[2];
    Tensor out({batch, ch});
    for (int b = 0; b < batch; ++b) {
      for (int c = 0; c < ch; ++c) out.at(b, c) = in.at(b, time - 1, c);
    }
    return out;
  }

  Tensor backward(const Tensor& dout) {
    Tensor din(shape_);
    const int batch = shape_[0], time = shape_[1], ch = shape_[2];
    for (int b = 0; b < batch; ++b) {
      for (int c = 0; c < ch; ++c) din.at(b, time - 1, c) = dout.at(b, c);
    }
    return din;
  }

 private:
  std::vector<int> shape_;
};

class GlobalMaxOverTime {
 public:
  Tensor forward(const Tensor& in) {
    shape_ = in.shape;
    const int batch = in.shape[0], time = in.shape[1], ch = in.shape[2];
    Tensor out({batch, ch});
    argmax_.assign(static_cast<std::size_t>(batch) * ch, 0);
    for (int b = 0; b < batch; ++b) {
      for (int c = 0; c < ch; ++c) {
        int best_t = 0;
        double best = in.at(b, 0, c);
        for (int t = 1; t < time; ++t) {
          if (in.at(b, t, c) > best) {
            best = in.at(b, t, c);
            best_t = t;
          }
        }
        out.at(b, c) = best;
        argmax_[static_cast<std::size_t>(b) * ch + c] = best_t;
      }
    }
    return out;
  }

  Tensor backward(const Tensor& dout) {
    Tensor din(shape_);
    const int batch = shape_[0], ch = shape_[2];
    for (int b = 0; b < batch; ++b) {
      for (int c = 0; c < ch; ++c) {
        din.at(b, argmax_[static_cast<std::size_t>(b) * ch + c], c) = dout.at(b, c);
      }
    }
    return din;
  }

 private:
  std::vector<int> shape_;
  std::vector<int> argmax_;
};

// ---------------------------------------------------------------------------
// dense
// ---------------------------------------------------------------------------

class DenseLayer {
 public:
  DenseLayer(std::string name, int units, int in_features, bool relu, Rng& init)
      : relu_(relu),
        weights_(name + ".weights", Tensor({units, in_features})),
        bias_(name + ".bias", Tensor({units})) {
    double bound = std::sqrt(6.0 / (in_features + units));
    for (double& w : weights_.value.v) w = init.uniform(-bound, bound);
  }

  Param& weights() { return weights_; }
  Param& bias() { return bias_; }

  Tensor forward(const Tensor& in) {
    input_ = in;
    const int batch = in.shape[0], features = in.shape[1];
    const int units = weights_.value.shape[0];
    Tensor out({batch, units});
    for (int b = 0; b < batch; ++b) {
      for (int u = 0; u < units; ++u) {
        double acc = bias_.value[static_cast<std::size_t>(u)];
        for (int f = 0; f < features; ++f) acc += weights_.value.at(u, f) * in.at(b, f);
        out.at(b, u) = relu_ ? std::max(acc, 0.0) : acc;
      }
    }
    output_ = out;
    return out;
  }

  Tensor backward(const Tensor& dout) {
    const int batch = input_.shape[0], features = input_.shape[1];
    const int units = weights_.value.shape[0];
    Tensor din(input_.shape);
    for (int b = 0; b < batch; ++b) {
      for (int u = 0; u < units; ++u) {
        double g = dout.at(b, u);
        if (relu_ && output_.at(b, u) <= 0.0) continue;
        bias_.grad[static_cast<std::size_t>(u)] += g;
        for (int f = 0; f < features; ++f) {
          weights_.grad.at(u, f) += g * input_.at(b, f);
          din.at(b, f) += g * weights_.value.at(u, f);
        }
      }
    }
    return din;
  }

 private:
  bool relu_;
  Param weights_, bias_;
  Tensor input_, output_;
};

// ---------------------------------------------------------------------------
// softmax and loss
// ---------------------------------------------------------------------------

// Row-wise softmax with max subtraction. Rows sum to 1.
inline Tensor softmax_rows(const Tensor& logits) {
  Tensor probs = logits;
  const int batch = logits.shape[0], classes = logits.shape[1];
  for (int b = 0; b < batch; ++b) {
    double mx = logits.at(b, 0);
    for (int c = 1; c < classes; ++c) mx = std::max(mx, logits.at(b, c));
    double sum = 0.0;
    for (int c = 0; c < classes; ++c) {
      double e = std::exp(logits.at(b, c) - mx);
      probs.at(b, c) = e;
      sum += e;
    }
    for (int c = 0; c < classes; ++c) probs.at(b, c) /= sum;
  }
  return probs;
}

// hidden = relu(wd.input + bd); probabilities = softmax(wo.hidden + bo).
inline std::vector<double> dense_softmax(const std::vector<double>& input,
                                         const Tensor& wd, const Tensor& bd,
                                         const Tensor& wo, const Tensor& bo) {
  const int hidden_units = wd.shape[0];
  const int classes = wo.shape[0];
  std::vector<double> hidden(static_cast<std::size_t>(hidden_units));
  for (int u = 0; u < hidden_units; ++u) {
    double acc = bd[static_cast<std::size_t>(u)];
    for (std::size_t f = 0; f < input.size(); ++f) acc += wd.at(u, static_cast<int>(f)) * input[f];
    hidden[u] = std::max(acc, 0.0);
  }
  Tensor logits({1, classes});
  for (int c = 0; c < classes; ++c) {
    double acc = bo[static_cast<std::size_t>(c)];
    for (int u = 0; u < hidden_units; ++u) acc += wo.at(c, u) * hidden[u];
    logits.at(0, c) = acc;
  }
  Tensor probs = softmax_rows(logits);
  return probs.v;
}

// Mean over the batch of weight[y] * (-log p[y]); probabilities are clamped
// at 1e-12 before the log.
inline double weighted_cross_entropy(const Tensor& probs,
                                     const std::vector<int>& labels,
                                     const std::vector<double>& class_weights) {
  const int batch = probs.shape[0];
  double loss = 0.0;
  for (int b = 0; b < batch; ++b) {
    double p = std::max(probs.at(b, labels[static_cast<std::size_t>(b)]), 1e-12);
    loss += class_weights[static_cast<std::size_t>(labels[b])] * -std::log(p);
  }
  return loss / batch;
}

}  // namespace olw::nn
