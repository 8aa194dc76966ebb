#ifndef DTMI_RNG_HPP_
#define DTMI_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace dtmi {

// Seed plus substream index. Identical (seed, stream) pairs reproduce
// identical draws on every platform and thread count: the engine is a
// fully-specified mt19937_64 and all variate transforms below avoid
// std::*_distribution (whose output is implementation-defined).
struct RngSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  friend bool operator==(const RngSeed&, const RngSeed&) = default;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}
}  // namespace detail

// Deterministic and injective in `index` for a fixed seed: the affine map
// with an odd multiplier is a bijection on 2^64 and splitmix64 is a bijection.
inline RngSeed derive_substream(const RngSeed& seed, std::uint64_t index) {
  RngSeed out;
  out.seed = seed.seed;
  out.stream = detail::splitmix64(seed.stream + 0x9E3779B97F4A7C15ULL * (index + 1));
  return out;
}

class Rng {
 public:
  explicit Rng(const RngSeed& s)
      : engine_(detail::splitmix64(detail::splitmix64(s.seed) ^ s.stream)) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Marsaglia polar method; deterministic given the engine stream.
  double normal() {
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
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

  // Index sampled from unnormalized nonnegative weights by CDF inversion.
  int categorical(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform() * total;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      u -= weights[i];
      if (u < 0.0) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size()) - 1;
  }

  int uniform_int(int n) {  // 0..n-1
    return static_cast<int>(engine_() % static_cast<std::uint64_t>(n));
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace dtmi

#endif  // DTMI_RNG_HPP_
