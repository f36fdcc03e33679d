#pragma once

#include <array>
#include <cstdint>

namespace sdr {

// Deterministic stream generator: xoshiro256++ state seeded through SplitMix64
// from the pair (seed, stream). Distinct pairs give statistically independent
// streams, and a given pair reproduces the same draw sequence bit for bit on
// any platform. Gaussians come from Box-Muller on the raw 53-bit uniforms, so
// no libc distribution enters the picture.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  double uniform01();  // [0, 1)
  double normal();     // standard normal

 private:
  std::array<std::uint64_t, 4> s_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace sdr
