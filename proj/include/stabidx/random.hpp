#pragma once

// Reproducible random streams: xoshiro256++ with 2^128 jump-ahead for
// disjoint substreams, and a Ziggurat sampler for N(0,1).

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>

namespace stabidx {

inline constexpr std::uint64_t kDefaultSeed = 20240521;

inline constexpr std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// xoshiro256++ (Blackman & Vigna). Satisfies UniformRandomBitGenerator.
class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256pp(std::uint64_t seed = kDefaultSeed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
  }

  explicit Xoshiro256pp(const std::array<std::uint64_t, 4>& state) : s_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Advances by 2^128 draws.
  void jump() {
    static constexpr std::array<std::uint64_t, 4> kJump = {
        0x180ec6d33cfd0abaULL, 0xd5a61266f0c9392cULL, 0xa9582618e03fc9aaULL, 0x39abdc4529b1661cULL};
    std::array<std::uint64_t, 4> acc{};
    for (std::uint64_t word : kJump) {
      for (int b = 0; b < 64; ++b) {
        if (word & (std::uint64_t{1} << b))
          for (int i = 0; i < 4; ++i) acc[i] ^= s_[i];
        (*this)();
      }
    }
    s_ = acc;
  }

  const std::array<std::uint64_t, 4>& state() const { return s_; }

  friend bool operator==(const Xoshiro256pp&, const Xoshiro256pp&) = default;

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::array<std::uint64_t, 4> s_{};
};

/// Substream `id` of `seed`: the seeded stream advanced by id * 2^128 draws.
/// Streams for distinct ids never overlap within 2^128 draws.
inline Xoshiro256pp substream(std::uint64_t seed, std::uint64_t id) {
  Xoshiro256pp g(seed);
  for (std::uint64_t i = 0; i < id; ++i) g.jump();
  return g;
}

/// Uniform in (0, 1], 53-bit resolution.
inline double uniform_open0(std::uint64_t bits) {
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

namespace detail {

// 128-layer Ziggurat for the unnormalised density exp(-x^2/2).
struct ZigguratTables {
  static constexpr int kLayers = 128;
  static constexpr double kR = 3.442619855899;       // start of the tail
  static constexpr double kV = 9.91256303526217e-3;  // area of each layer
  std::array<double, kLayers + 1> x{};
  std::array<double, kLayers> ratio{};

  ZigguratTables() {
    double f = std::exp(-0.5 * kR * kR);
    x[0] = kV / f;  // base layer incl. tail, expressed as a pseudo-width
    x[1] = kR;
    x[kLayers] = 0.0;
    for (int i = 2; i < kLayers; ++i) {
      x[i] = std::sqrt(-2.0 * std::log(kV / x[i - 1] + f));
      f = std::exp(-0.5 * x[i] * x[i]);
    }
    for (int i = 0; i < kLayers; ++i) ratio[i] = x[i + 1] / x[i];
  }
};

inline const ZigguratTables& ziggurat_tables() {
  static const ZigguratTables t;
  return t;
}

}  // namespace detail

/// Standard normal variates by the Ziggurat rejection method.
///
/// Each attempt consumes one 64-bit word: the top 53 bits give the signed
/// abscissa and the low 7 bits pick the layer.
class ZigguratNormal {
 public:
  template <class Gen>
  double operator()(Gen& gen) const {
    const auto& t = detail::ziggurat_tables();
    for (;;) {
      const std::uint64_t bits = gen();
      const double u = 2.0 * (static_cast<double>(bits >> 11) * 0x1.0p-53) - 1.0;
      const int i = static_cast<int>(bits & 0x7F);
      if (std::abs(u) < t.ratio[i]) return u * t.x[i];
      if (i == 0) return tail(gen, u < 0.0);
      const double x = u * t.x[i];
      const double f0 = std::exp(-0.5 * (t.x[i] * t.x[i] - x * x));
      const double f1 = std::exp(-0.5 * (t.x[i + 1] * t.x[i + 1] - x * x));
      if (f1 + uniform_open0(gen()) * (f0 - f1) < 1.0) return x;
    }
  }

 private:
  // Marsaglia's exact sampler for |Z| > R.
  template <class Gen>
  static double tail(Gen& gen, bool negative) {
    constexpr double r = detail::ZigguratTables::kR;
    double x = 0.0, y = 0.0;
    do {
      x = std::log(uniform_open0(gen())) / r;
      y = std::log(uniform_open0(gen()));
    } while (-2.0 * y < x * x);
    return negative ? x - r : r - x;
  }
};

/// A generator bound to a normal sampler; callable as `double()`.
template <class Gen = Xoshiro256pp>
class NormalStream {
 public:
  explicit NormalStream(Gen gen) : gen_(std::move(gen)) {}
  double operator()() { return normal_(gen_); }
  Gen& generator() { return gen_; }

 private:
  Gen gen_;
  ZigguratNormal normal_;
};

}  // namespace stabidx
