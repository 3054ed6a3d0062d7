#pragma once

#include <cmath>
#include <cstdint>

#include "mddcm/types.hpp"

namespace mddcm {

// -----------------------------------------------------------------------------
// Counter-based random streams.
//
// Every stream of standard-normal draws is a pure function of
// (master_seed, replicate_index, instant_key): the Philox 4x32-10 block cipher
// keyed by the master seed is applied to the counter
// (replicate_lo, replicate_hi, instant_key, block), and each 128-bit output
// block is turned into two N(0,1) values via Box-Muller. Streams never share
// state, so replicates can run on any number of workers and still reproduce
// bit-for-bit.
// -----------------------------------------------------------------------------

namespace philox {

struct Block {
  std::uint32_t x[4];
};

inline Block encrypt(std::uint64_t key, const Block& counter) {
  constexpr std::uint32_t kMul0 = 0xD2511F53u;
  constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  std::uint32_t c0 = counter.x[0], c1 = counter.x[1], c2 = counter.x[2], c3 = counter.x[3];
  std::uint32_t k0 = static_cast<std::uint32_t>(key);
  std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);

  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c0;
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c2;
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    c0 = hi1 ^ c1 ^ k0;
    c1 = lo1;
    c2 = hi0 ^ c3 ^ k1;
    c3 = lo0;
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return Block{{c0, c1, c2, c3}};
}

// u1 in (0,1], u2 in [0,1): 53-bit mantissas from the four output words.
inline void to_uniforms(const Block& b, double& u1, double& u2) {
  const std::uint64_t w0 =
      (static_cast<std::uint64_t>(b.x[0]) << 32) | b.x[1];
  const std::uint64_t w1 =
      (static_cast<std::uint64_t>(b.x[2]) << 32) | b.x[3];
  u1 = static_cast<double>((w0 >> 11) + 1) * 0x1.0p-53;
  u2 = static_cast<double>(w1 >> 11) * 0x1.0p-53;
}

}  // namespace philox

/// n standard-normal draws, a pure function of (key, replicate, instant_key).
inline Vector normal_stream(std::uint64_t master_seed, std::uint64_t replicate_index,
                            std::uint32_t instant_key, Index n) {
  if (n < 1) throw std::invalid_argument("normal_stream: need n >= 1");
  Vector out(n);
  const Index blocks = (n + 1) / 2;
  for (Index block = 0; block < blocks; ++block) {
    philox::Block ctr{{static_cast<std::uint32_t>(replicate_index),
                       static_cast<std::uint32_t>(replicate_index >> 32), instant_key,
                       static_cast<std::uint32_t>(block)}};
    double u1 = 0.0, u2 = 0.0;
    philox::to_uniforms(philox::encrypt(master_seed, ctr), u1, u2);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    out(2 * block) = radius * std::cos(angle);
    if (2 * block + 1 < n) out(2 * block + 1) = radius * std::sin(angle);
  }
  return out;
}

/// Wild-bootstrap multipliers e_1..e_n for one bootstrap replicate.
struct MultiplierStream {
  std::uint64_t master_seed = 0;
  std::uint64_t replicate_index = 0;
  Vector values;
};

inline MultiplierStream wild_multipliers(std::uint64_t master_seed,
                                         std::uint64_t replicate_index, Index n) {
  return MultiplierStream{master_seed, replicate_index,
                          normal_stream(master_seed, replicate_index, 0, n)};
}

// Seed derivation for nested jobs (per-covariate partial tests, Monte Carlo
// replicates, scenario noise processes). splitmix64 finalizer; collisions
// between purposes are avoided by folding the purpose tag in first.
enum class SeedPurpose : std::uint64_t {
  partial_test = 1,
  mc_data = 2,
  mc_test = 3,
  gp_noise = 4,
};

inline std::uint64_t mix_seed(std::uint64_t x, std::uint64_t salt) {
  x += 0x9E3779B97F4A7C15ull * (salt + 1);
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, SeedPurpose purpose,
                                 std::uint64_t index) {
  return mix_seed(mix_seed(master, static_cast<std::uint64_t>(purpose)), index);
}

}  // namespace mddcm
