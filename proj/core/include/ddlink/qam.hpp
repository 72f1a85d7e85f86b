#pragma once

#include <cstdint>
#include <vector>

#include "ddlink/linalg.hpp"

namespace ddlink {

// Gray-coded square QAM with unit average symbol energy. ber_coeff_a/_b are
// the coefficients of the Gray-coded BER expression a*erfc(sqrt(b*sinr));
// both equal 1/2 for 4-QAM.
struct ModulationSpec {
  int order = 4;
  int bits_per_symbol = 2;
  double ber_coeff_a = 0.5;
  double ber_coeff_b = 0.5;
  std::vector<cxd> points;  // indexed by the symbol's bit label

  static ModulationSpec square_qam(int order);
};

std::vector<cxd> qam_map(const std::vector<std::uint8_t>& bits,
                         const ModulationSpec& mod);
// Nearest-neighbor hard decisions.
std::vector<std::uint8_t> qam_demap(const std::vector<cxd>& symbols,
                                    const ModulationSpec& mod);
std::uint8_t qam_demap_symbol_bits(cxd symbol, const ModulationSpec& mod);

}  // namespace ddlink
