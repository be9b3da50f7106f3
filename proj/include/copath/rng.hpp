#pragma once

#include <array>
#include <cstdint>

namespace copath {

// Philox4x32-10 counter-based generator (Salmon et al. 2011). Streams are
// cheap: a (seed, stream) pair names an independent sequence, which is what
// the Monte Carlo harness uses to give every replication its own stream.
class Philox {
public:
  using Block = std::array<std::uint32_t, 4>;

  Philox(std::uint64_t seed, std::uint64_t stream = 0);

  // Raw 4x32 block for the current counter; advances the counter.
  Block next_block();

  std::uint64_t next_u64();
  double uniform();                       // [0, 1)
  double uniform(double lo, double hi);   // [lo, hi)
  double normal();                        // standard normal, Box-Muller
  double normal(double mean, double sd);

private:
  std::array<std::uint32_t, 2> key_;
  Block counter_{};
  Block buffer_{};
  int buffer_pos_ = 4;   // 4 = empty
  double spare_normal_ = 0.0;
  bool have_spare_ = false;

  std::uint32_t next_u32();
  void bump_counter();
};

}  // namespace copath
