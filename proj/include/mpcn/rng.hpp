#pragma once

// Deterministic pseudo-random number streams.
//
// Generator: xoshiro256++ (Blackman & Vigna), seeded through two independent
// splitmix64 chains keyed by (seed, stream_id). One stream per chain, never
// shared. A fixed (seed, stream_id) pair reproduces the draw sequence
// bit-for-bit; distinct stream_ids give statistically independent streams.
// The concrete algorithms below (polar normal, Marsaglia-Tsang gamma) are part
// of the reproducibility contract and must not be swapped silently.

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace mpcn {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state, std::uint64_t gamma) {
  std::uint64_t z = (state += gamma);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
      : seed_(seed), stream_id_(stream_id) {
    std::uint64_t a = seed;
    std::uint64_t b = stream_id;
    for (auto& word : state_) {
      word = detail::splitmix64(a, 0x9e3779b97f4a7c15ULL) ^
             detail::splitmix64(b, 0xd1b54a32d192ed03ULL);
    }
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64() {
    const std::uint64_t result =
        detail::rotl64(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl64(state_[3], 45);
    return result;
  }

  // Jump ahead by 2^128 draws (for deriving non-overlapping substreams by
  // hand; normal use derives streams from stream_id instead).
  void jump() {
    static constexpr std::uint64_t kJump[] = {
        0x180ec6d33cfd0abaULL, 0xd5a61266f0c9392cULL, 0xa9582618e03fc9aaULL,
        0x39abdc4529b1661cULL};
    std::uint64_t s0 = 0, s1 = 0, s2 = 0, s3 = 0;
    for (std::uint64_t word : kJump) {
      for (int b = 0; b < 64; ++b) {
        if (word & (std::uint64_t{1} << b)) {
          s0 ^= state_[0];
          s1 ^= state_[1];
          s2 ^= state_[2];
          s3 ^= state_[3];
        }
        next_u64();
      }
    }
    state_[0] = s0;
    state_[1] = s1;
    state_[2] = s2;
    state_[3] = s3;
  }

  // Uniform on the open interval (0,1); safe as an argument of log().
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via the Marsaglia polar method. Pairs are generated; the
  // spare is cached on the stream.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  // Gamma(shape, rate 1) via Marsaglia & Tsang (2000), ACM TOMS 26(3).
  // Shapes below one use the usual power-of-uniform boost.
  double gamma(double shape) {
    if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape must be > 0");
    if (shape < 1.0) {
      const double g = gamma(shape + 1.0);
      return g * std::pow(uniform01(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform01();
      const double x2 = x * x;
      if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
      if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double chi_squared(double dof) { return 2.0 * gamma(0.5 * dof); }

 private:
  std::uint64_t state_[4];
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline void fill_std_normal(RngStream& rng, std::span<double> out) {
  for (double& v : out) v = rng.normal();
}

inline std::vector<double> sample_std_normal_vec(int d, RngStream& rng) {
  if (d < 1) throw std::invalid_argument("sample_std_normal_vec: d must be >= 1");
  std::vector<double> w(static_cast<std::size_t>(d));
  fill_std_normal(rng, w);
  return w;
}

// Student-t draw: normal over the square root of a scaled chi-squared.
inline double sample_t_scalar(double dof, RngStream& rng) {
  if (!(dof > 0.0)) throw std::invalid_argument("sample_t_scalar: dof must be > 0");
  const double n = rng.normal();
  return n / std::sqrt(rng.chi_squared(dof) / dof);
}

}  // namespace mpcn
