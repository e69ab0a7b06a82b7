#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace wardrop {

/// Seeded 64-bit PRNG with a stable mapping to doubles and ints, so that
/// generated instances and experiment histograms are reproducible run to run.
/// (std::uniform_real_distribution is avoided on purpose: its output is not
/// pinned down by the standard.)
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform double in [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, n), n > 0.
  std::uint64_t below(std::uint64_t n) { return gen_() % n; }

  /// Fisher-Yates shuffle, stable stream order.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

  /// Random point of the belief simplex (symmetric Dirichlet via
  /// exponential draws).
  std::vector<double> simplex_point(int dim) {
    std::vector<double> w(dim);
    double sum = 0.0;
    for (double& x : w) {
      double u = uniform01();
      if (u <= 0.0) u = 0x1.0p-53;
      x = -std::log(u);
      sum += x;
    }
    for (double& x : w) x /= sum;
    // nudge the last coordinate so the vector sums to 1 exactly
    double s = 0.0;
    for (int i = 0; i + 1 < dim; ++i) s += w[i];
    w[dim - 1] = 1.0 - s;
    return w;
  }

 private:
  std::mt19937_64 gen_;
};

/// Mixes a base seed with stream indices (e.g. tau index, run index) into an
/// independent per-run seed. SplitMix64 finalizer.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (a + 1) + 0xbf58476d1ce4e5b9ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace wardrop
