#include "copath/rng.hpp"

#include <cmath>
#include <numbers>

namespace copath {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

Philox::Philox(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t k = seed ^ stream;
  key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
  counter_ = {0, 0, 0, 0};
}

Philox::Block Philox::next_block() {
  Block x = counter_;
  std::uint32_t k0 = key_[0], k1 = key_[1];
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, x[0], hi0, lo0);
    mulhilo(kMul1, x[2], hi1, lo1);
    x = {hi1 ^ x[1] ^ k0, lo1, hi0 ^ x[3] ^ k1, lo0};
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  bump_counter();
  return x;
}

void Philox::bump_counter() {
  for (int i = 0; i < 4; ++i) {
    if (++counter_[i] != 0) break;
  }
}

std::uint32_t Philox::next_u32() {
  if (buffer_pos_ >= 4) {
    buffer_ = next_block();
    buffer_pos_ = 0;
  }
  return buffer_[buffer_pos_++];
}

std::uint64_t Philox::next_u64() {
  std::uint64_t hi = next_u32();
  std::uint64_t lo = next_u32();
  return (hi << 32) | lo;
}

double Philox::uniform() {
  // 53 random mantissa bits -> [0, 1)
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Philox::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Philox::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_normal_;
  }
  // Box-Muller; 1-u guarantees a strictly positive log argument
  double u1 = 1.0 - uniform();
  double u2 = uniform();
  double radius = std::sqrt(-2.0 * std::log(u1));
  double angle = 2.0 * std::numbers::pi * u2;
  spare_normal_ = radius * std::sin(angle);
  have_spare_ = true;
  return radius * std::cos(angle);
}

double Philox::normal(double mean, double sd) { return mean + sd * normal(); }

}  // namespace copath
