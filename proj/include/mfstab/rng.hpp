#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace mfstab {

/// Seeded random stream. Only the engine (std::mt19937_64) comes from the
/// standard library; every distribution is implemented here so that output
/// is bit-identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Unbiased uniform integer in [0, n).
  std::uint64_t index(std::uint64_t n);

  /// Standard normal (Marsaglia polar method).
  double normal();

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform sign in {-1, +1}.
  int sign() { return (engine_() >> 63) ? 1 : -1; }

 private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// Derives a child seed from a master seed, a named stream and a list of
/// integer coordinates (trial id, vertex id, ...). Streams that differ in any
/// component are statistically independent.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream,
                          std::initializer_list<std::uint64_t> ids = {});

/// 64-bit FNV-1a over a byte string.
std::uint64_t fnv1a(std::string_view bytes);

}  // namespace mfstab
