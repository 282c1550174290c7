#pragma once

#include <cstdint>
#include <random>

#include "pblab/types.hpp"

namespace pblab {

// Deterministic random stream.  We only ever draw raw 64-bit words from
// mt19937_64 and map them to doubles ourselves: the standard distributions
// are not guaranteed to produce identical sequences across library
// implementations, and reports must be byte-for-byte reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Marsaglia polar method on top of uniform(); portable across platforms.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
  }

  Vec uniform_vec(int n, double lo, double hi) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = uniform(lo, hi);
    return v;
  }

  Vec gaussian_vec(int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = gaussian();
    return v;
  }

  // Uniform direction on the unit sphere in R^n.
  Vec direction(int n) {
    Vec v;
    double s;
    do {
      v = gaussian_vec(n);
      s = v.norm();
    } while (s < 1e-12);
    return v / s;
  }

  // Derive an independent child stream (for per-job determinism).
  Rng fork(std::uint64_t salt) {
    return Rng(gen_() ^ (0x9e3779b97f4a7c15ULL * (salt + 1)));
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace pblab
