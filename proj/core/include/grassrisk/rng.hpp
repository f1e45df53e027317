#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace grassrisk {

/// Philox4x64-10 counter-based generator.
///
/// The keyed block function is bit-compatible with the Random123 / NumPy
/// Philox variant, so streams are reproducible across platforms and can be
/// cross-checked against other implementations. A generator is a (key,
/// counter) pair: the key carries the 64-bit user seed plus an independent
/// stream id, the counter enumerates 256-bit blocks.
class Philox {
 public:
  using Block = std::array<std::uint64_t, 4>;
  using Key = std::array<std::uint64_t, 2>;

  explicit Philox(std::uint64_t seed, std::uint64_t stream = 0)
      : key_{seed, stream} {}

  /// One keyed block of the underlying bijection (10 rounds).
  static Block block(Block ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += 0x9E3779B97F4A7C15ULL;
        key[1] += 0xBB67AE8584CAA73BULL;
      }
      ctr = single_round(ctr, key);
    }
    return ctr;
  }

  std::uint64_t next_u64() {
    if (pos_ == 4) {
      buf_ = block(ctr_, key_);
      advance_counter();
      pos_ = 0;
    }
    return buf_[pos_++];
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; consumes two uniforms per pair.
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] so the logarithm stays finite.
    const double u1 = 1.0 - next_double();
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * kPi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  static constexpr double kPi = 3.141592653589793238462643383279502884;

  static void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi,
                      std::uint64_t& lo) {
    const unsigned __int128 p =
        static_cast<unsigned __int128>(a) * static_cast<unsigned __int128>(b);
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
  }

  static Block single_round(const Block& ctr, const Key& key) {
    std::uint64_t hi0, lo0, hi1, lo1;
    mulhilo(0xD2E7470EE14C6C93ULL, ctr[0], hi0, lo0);
    mulhilo(0xCA5A826395121157ULL, ctr[2], hi1, lo1);
    return Block{hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }

  void advance_counter() {
    for (int w = 0; w < 4; ++w) {
      if (++ctr_[w] != 0) break;
    }
  }

  Block ctr_{0, 0, 0, 0};
  Key key_;
  Block buf_{};
  int pos_ = 4;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// Splitting rule for Monte Carlo trials: trial t of a run seeded with `seed`
/// uses an independent generator keyed by `seed ^ t`.
inline std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial_index) {
  return seed ^ trial_index;
}

}  // namespace grassrisk
