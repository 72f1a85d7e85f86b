#include "ddlink/rng.hpp"

#include <cmath>
#include <numbers>

namespace ddlink {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

RngStream::RngStream(std::uint64_t seed) : engine_(seed) {}

RngStream RngStream::derive(std::uint64_t master, std::uint64_t cell,
                            std::uint64_t trial) {
  std::uint64_t s = master;
  splitmix64(s);
  s ^= 0xa076'1d64'78bd'642fULL * (cell + 1);
  splitmix64(s);
  s ^= 0xe703'7ed1'a0b4'28dbULL * (trial + 1);
  return RngStream(splitmix64(s));
}

std::uint64_t RngStream::next_u64() { return engine_(); }

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

int RngStream::bit() { return static_cast<int>(next_u64() >> 63); }

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller on (0,1] x [0,1).
  double u1 = 1.0 - uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

std::complex<double> RngStream::complex_normal() {
  constexpr double half = 0.7071067811865476;  // 1/sqrt(2)
  double re = normal();
  double im = normal();
  return {half * re, half * im};
}

}  // namespace ddlink
