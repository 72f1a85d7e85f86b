#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace ddlink {

// Deterministic random stream. Streams are derived from a master seed plus
// integer indices (sweep cell, trial), so the draw sequence of one trial never
// depends on scheduling or worker count. Gaussians use an explicit Box-Muller
// so results do not depend on the standard library's distribution internals.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  // Stream for (master seed, cell index, trial index).
  static RngStream derive(std::uint64_t master, std::uint64_t cell,
                          std::uint64_t trial = 0);

  std::uint64_t next_u64();
  double uniform();   // [0, 1)
  int bit();          // fair coin
  double normal();    // N(0, 1)
  std::complex<double> complex_normal();  // CN(0, 1): variance 1/2 per part

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// SplitMix64 mixing step, used for seed derivation.
std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace ddlink
