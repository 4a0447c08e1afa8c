#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace olw {

// Derives an independent stream seed from a master seed (splitmix64 mixing).
// Experiment cells, folds, and per-purpose streams (model init, SMOTE,
// shuffling, dropout) all obtain their seeds through this function so that
// every cell is reproducible in isolation:
//
//   grid split seed      = mix_seed(master_seed, 0xA11)
//   embedding init seed  = mix_seed(mix_seed(master_seed, 0xE3B), key_index)
//   cell_seed            = mix_seed(master_seed, cell_index)
//   fold_seed            = mix_seed(cell_seed, 1000 + fold_index)
//   model init / SMOTE / shuffle / dropout / inner validation split
//                        = mix_seed(fold_seed, 1..5)
//
// (constants live in experiment.hpp's seed_stream namespace)
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic random stream. Wraps std::mt19937_64 (whose output sequence
// is pinned by the standard) and converts to doubles/integers without going
// through std::uniform_*_distribution, which is implementation-defined and
// would break bit-identical reproducibility across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1) with 53 bits of precision.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). n must be > 0.
  std::size_t below(std::size_t n) {
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Fisher-Yates; used instead of std::shuffle for portability.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace olw
