#include "ddlink/qam.hpp"

#include <cmath>

#include "ddlink/errors.hpp"

namespace ddlink {

namespace {

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

int gray_encode(int v) { return v ^ (v >> 1); }

// Level index 0 maps to the most positive coordinate.
double level_coordinate(int level, int side) {
  return static_cast<double>(side - 1 - 2 * level);
}

int nearest_level(double coord, int side) {
  int level = static_cast<int>(std::lround((side - 1 - coord) / 2.0));
  if (level < 0) level = 0;
  if (level >= side) level = side - 1;
  return level;
}

}  // namespace

ModulationSpec ModulationSpec::square_qam(int order) {
  if (order < 4 || !is_power_of_two(order))
    throw ConfigError("square_qam: order must be a power-of-two >= 4");
  int bits = 0;
  for (int v = order; v > 1; v >>= 1) ++bits;
  if (bits % 2 != 0)
    throw ConfigError("square_qam: non-square constellation order");

  ModulationSpec mod;
  mod.order = order;
  mod.bits_per_symbol = bits;
  mod.ber_coeff_a = (2.0 / bits) * (1.0 - 1.0 / std::sqrt(double(order)));
  mod.ber_coeff_b = 1.5 / (order - 1.0);

  const int side = 1 << (bits / 2);
  const double norm = std::sqrt(2.0 * (order - 1.0) / 3.0);
  mod.points.resize(order);
  for (int li = 0; li < side; ++li) {
    for (int lq = 0; lq < side; ++lq) {
      int label = (gray_encode(li) << (bits / 2)) | gray_encode(lq);
      mod.points[label] = cxd(level_coordinate(li, side) / norm,
                              level_coordinate(lq, side) / norm);
    }
  }
  return mod;
}

std::vector<cxd> qam_map(const std::vector<std::uint8_t>& bits,
                         const ModulationSpec& mod) {
  if (bits.size() % mod.bits_per_symbol != 0)
    throw ConfigError("qam_map: bit count not divisible by bits per symbol");
  std::vector<cxd> out(bits.size() / mod.bits_per_symbol);
  for (std::size_t s = 0; s < out.size(); ++s) {
    int label = 0;
    for (int b = 0; b < mod.bits_per_symbol; ++b)
      label = (label << 1) | (bits[s * mod.bits_per_symbol + b] & 1);
    out[s] = mod.points[label];
  }
  return out;
}

std::uint8_t qam_demap_symbol_bits(cxd symbol, const ModulationSpec& mod) {
  const int half = mod.bits_per_symbol / 2;
  const int side = 1 << half;
  const double norm = std::sqrt(2.0 * (mod.order - 1.0) / 3.0);
  int li = nearest_level(symbol.real() * norm, side);
  int lq = nearest_level(symbol.imag() * norm, side);
  return static_cast<std::uint8_t>((gray_encode(li) << half) |
                                   gray_encode(lq));
}

std::vector<std::uint8_t> qam_demap(const std::vector<cxd>& symbols,
                                    const ModulationSpec& mod) {
  std::vector<std::uint8_t> bits(symbols.size() * mod.bits_per_symbol);
  for (std::size_t s = 0; s < symbols.size(); ++s) {
    int label = qam_demap_symbol_bits(symbols[s], mod);
    for (int b = 0; b < mod.bits_per_symbol; ++b) {
      bits[s * mod.bits_per_symbol + b] =
          static_cast<std::uint8_t>((label >> (mod.bits_per_symbol - 1 - b)) & 1);
    }
  }
  return bits;
}

}  // namespace ddlink
