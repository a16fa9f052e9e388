#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace acquaint {

// Philox4x32-10 counter-based generator (Salmon et al., Random123). A (key,
// counter) pair maps to four 32-bit words; there is no hidden state, so any
// stream can be addressed directly by its counter.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static constexpr Counter generate(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Combine a parent seed with a child index into an independent child seed.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t child) {
  return splitmix64(splitmix64(parent) ^ (child * 0xD1B54A32D192ED03ull + 0x8CB92BA72F3D8DD7ull));
}

constexpr Philox4x32::Key make_key(std::uint64_t seed) {
  const std::uint64_t mixed = splitmix64(seed);
  return {static_cast<std::uint32_t>(mixed), static_cast<std::uint32_t>(mixed >> 32)};
}

// Stream domains keep the counters of unrelated consumers disjoint.
enum class Domain : std::uint32_t {
  init = 1,
  discrete_step = 2,
  continuous_jump = 3,
  graph_build = 4,
  harness = 5,
  oracle = 6,
};

// [0,1) with 53 random bits.
constexpr double to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (std::uint64_t{hi} << 32) | lo;
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, range) by multiply-shift; bias is below 2^-32 * range.
constexpr std::uint32_t to_bounded(std::uint32_t hi, std::uint32_t lo, std::uint32_t range) {
  const std::uint64_t bits = (std::uint64_t{hi} << 32) | lo;
  return static_cast<std::uint32_t>((static_cast<unsigned __int128>(bits) * range) >> 64);
}

// UniformRandomBitGenerator view over one Philox stream: counter words 0..2
// are fixed by the caller, word 3 advances.
class PhiloxStream {
 public:
  using result_type = std::uint64_t;

  PhiloxStream(std::uint64_t seed, std::uint32_t a, std::uint32_t b, Domain domain)
      : key_(make_key(seed)), a_(a), b_(b), domain_(static_cast<std::uint32_t>(domain)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (used_ == 2) refill();
    const result_type out = (std::uint64_t{block_[2 * used_]} << 32) | block_[2 * used_ + 1];
    ++used_;
    return out;
  }

  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  std::uint64_t bounded(std::uint64_t range) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>((*this)()) * range) >> 64);
  }

 private:
  void refill() {
    block_ = Philox4x32::generate({a_, b_, domain_, next_++}, key_);
    used_ = 0;
  }

  Philox4x32::Key key_;
  std::uint32_t a_;
  std::uint32_t b_;
  std::uint32_t domain_;
  std::uint32_t next_ = 0;
  Philox4x32::Counter block_{};
  int used_ = 2;
};

}  // namespace acquaint
