#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace kqr {

// Deterministic seed derivation: one user seed fans out into independent
// substreams via splitmix64 mixing, so no module ever shares or reorders
// another module's draws.
struct SeedStream {
  std::uint64_t state = 0;

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static SeedStream root(std::uint64_t seed) { return SeedStream{mix(seed)}; }

  // Independent child stream; deterministic in (state, id).
  SeedStream child(std::uint64_t id) const {
    return SeedStream{mix(state ^ (0xd1342543de82ef95ULL * (id + 1)))};
  }
};

// Sampling wrapper with fixed algorithms (mt19937_64 engine is bit-specified by
// the standard; the transforms below are pinned here, not delegated to
// implementation-defined std distributions).
class Rng {
 public:
  explicit Rng(SeedStream s) : eng_(s.state) {}
  explicit Rng(std::uint64_t seed) : eng_(SeedStream::root(seed).state) {}

  std::uint64_t bits() { return eng_(); }

  // Uniform on [0, 1): 53-bit mantissa.
  double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * unit(); }

  // Box-Muller, cosine branch; consumes two draws per call.
  double normal() {
    const double u1 = static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = static_cast<double>(eng_() >> 11) * 0x1.0p-53;       // [0, 1)
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Chi-square with k degrees of freedom as a sum of squared standard normals.
  double chi_squared(int k) {
    double s = 0.0;
    for (int i = 0; i < k; ++i) {
      const double z = normal();
      s += z * z;
    }
    return s;
  }

  // Uniform integer in [0, n); rejection-free modulo bias is acceptable only if
  // n divides 2^64, so use Lemire-style rejection for exactness.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
    std::uint64_t v = eng_();
    while (v >= limit) v = eng_();
    return v % n;
  }

  // Deterministic Fisher-Yates permutation of {0, ..., n-1}.
  std::vector<Eigen::Index> permutation(Eigen::Index n) {
    std::vector<Eigen::Index> p(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
    for (Eigen::Index i = n - 1; i > 0; --i) {
      const auto j = static_cast<Eigen::Index>(below(static_cast<std::uint64_t>(i) + 1));
      std::swap(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(j)]);
    }
    return p;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace kqr
