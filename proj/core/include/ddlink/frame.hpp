#pragma once

#include <cstdint>
#include <vector>

#include "ddlink/linalg.hpp"
#include "ddlink/qam.hpp"

namespace ddlink {

// Grid geometry and physical constants of one OTFS frame.
//
// Conventions used throughout the library:
//   * the delay-Doppler grid X is M x N (delay rows m, Doppler columns k);
//   * DD vectors stack column-major, x[k*M + m] = X[m,k];
//   * time samples are indexed t = n*M + m, so s = F^H x with
//     F = F_N (x) I_M and s = vec(X F_N^H).
struct OtfsParams {
  Eigen::Index delay_bins = 64;            // M
  Eigen::Index doppler_bins = 16;          // N
  double subcarrier_spacing_hz = 30e3;     // delta_f
  double carrier_freq_hz = 4e9;            // f_c
  Eigen::Index cp_len = 5;                 // L_cp
  ModulationSpec modulation = ModulationSpec::square_qam(4);

  Eigen::Index frame_size() const { return delay_bins * doppler_bins; }
  double sample_interval() const {
    return 1.0 / (static_cast<double>(delay_bins) * subcarrier_spacing_hz);
  }
  void validate() const;
};

// Embedded pilot layout: single pilot at (pilot_delay, pilot_doppler), guard
// zeros spanning delay +-guard_delay and Doppler +-(order_ce + order_gce)/2.
struct PilotConfig {
  Eigen::Index pilot_delay = 32;   // l_p
  Eigen::Index pilot_doppler = 8;  // k_p
  Eigen::Index guard_delay = 5;    // L
  int order_ce = 2;                // Q_S
  int order_gce = 4;               // Q_L
  double pilot_power = 1.0;        // sigma_p^2
  double data_power = 1.0;         // sigma_d^2

  static PilotConfig centered(const OtfsParams& params, Eigen::Index guard_delay,
                              int order_ce, int order_gce,
                              double pilot_power = 1.0, double data_power = 1.0);
  Eigen::Index doppler_halfwidth() const {
    return static_cast<Eigen::Index>(order_ce + order_gce) / 2;
  }
  void validate(const OtfsParams& params) const;
};

enum class CellKind : std::uint8_t { Data = 0, Pilot = 1, Guard = 2 };

struct DdFrame {
  CMat grid;  // M x N
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> mask;

  CVec dd_vector() const;  // x[k*M + m]
};

// Fraction of the grid spent on pilot+guard: (2L+1)(Q_S+Q_L+1)/(NM).
double pilot_overhead(const OtfsParams& params, const PilotConfig& pilot);

Eigen::Index data_cell_count(const OtfsParams& params, const PilotConfig& pilot);

// DD-vector indices (k*M + m) of the data cells, ascending.
std::vector<Eigen::Index> data_cell_indices(const OtfsParams& params,
                                            const PilotConfig& pilot);

// Bits required to fill all data cells of one frame.
Eigen::Index frame_bit_count(const OtfsParams& params, const PilotConfig& pilot);

DdFrame build_frame(const OtfsParams& params, const PilotConfig& pilot,
                    const std::vector<std::uint8_t>& data_bits);

// Pilot-only frame (data cells zeroed).
DdFrame pilot_frame(const OtfsParams& params, const PilotConfig& pilot);

// Time-domain signal with cyclic prefix: the last cp_len samples of
// s = vec(X F_N^H) are prepended. Length NM + cp_len.
CVec modulate(const DdFrame& frame, const OtfsParams& params);

// DD-domain vector y = F r for a CP-free received vector of length NM.
CVec demodulate(const CVec& received, const OtfsParams& params);

CVec strip_cp(const CVec& with_cp, Eigen::Index cp_len);

}  // namespace ddlink
