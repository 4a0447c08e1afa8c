#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace olw::nn {

// Dense row-major tensor of doubles. Rank is implied by shape.size();
// the layer code below only ever uses ranks 1..3.
struct Tensor {
  std::vector<int> shape;
  std::vector<double> v;

  Tensor() = default;
  explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
    std::size_t n = 1;
    for (int d : shape) n *= static_cast<std::size_t>(d);
    v.assign(n, 0.0);
  }

  static Tensor zeros_like(const Tensor& other) { return Tensor(other.shape); }

  std::size_t size() const { return v.size(); }

  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }

  // rank-2 access
  double& at(int i, int j) { return v[static_cast<std::size_t>(i) * shape[1] + j]; }
  double at(int i, int j) const { return v[static_cast<std::size_t>(i) * shape[1] + j]; }

  // rank-3 access
  double& at(int i, int j, int k) {
    return v[(static_cast<std::size_t>(i) * shape[1] + j) * shape[2] + k];
  }
  double at(int i, int j, int k) const {
    return v[(static_cast<std::size_t>(i) * shape[1] + j) * shape[2] + k];
  }

  void fill(double x) { std::fill(v.begin(), v.end(), x); }

  bool all_finite() const {
    for (double x : v) {
      if (!std::isfinite(x)) return false;
    }
    return true;
  }
};

// A named parameter tensor with its gradient accumulator. Non-trainable
// parameters (a frozen embedding) keep their gradient at zero and are
// skipped by the optimizer.
struct Param {
  std::string name;
  Tensor value;
  Tensor grad;
  bool trainable = true;

  Param() = default;
  Param(std::string n, Tensor t, bool train = true)
      : name(std::move(n)), value(std::move(t)), grad(Tensor(value.shape)),
        trainable(train) {}

  void zero_grad() { grad.fill(0.0); }
};

}  // namespace olw::nn
