#pragma once

#include "ddlink/channel.hpp"
#include "ddlink/linalg.hpp"
#include "ddlink/rng.hpp"

namespace ddlink {

// Transceiver quality factors and thermal noise. xi = 1 is ideal hardware;
// 1 - xi of the signal power turns into additive white distortion.
struct HardwareProfile {
  double tx_quality = 1.0;   // xi_i
  double rx_quality = 1.0;   // xi_o
  double awgn_var = 0.0;     // sigma_w^2

  double combined_gain() const { return tx_quality * rx_quality; }
  double combined_amplitude() const;
  void validate() const;
};

struct DistortionVariances {
  double tx = 0.0;  // sigma_{z_i}^2
  double rx = 0.0;  // sigma_{z_o}^2
};

// signal_power is the statistical per-sample frame power E{|s|^2}
// (trace(Phi)/(NM)), not a per-realization measurement; channel_gain is
// sum_l sigma_l^2.
DistortionVariances distortion_variances(const HardwareProfile& hw,
                                         double signal_power,
                                         double channel_gain = 1.0);

// s_i = sqrt(xi_i) s + z_i, applied to the CP-prefixed signal.
CVec impair_transmit(const CVec& with_cp, const HardwareProfile& hw,
                     double signal_power, RngStream& rng);

// sqrt(xi_o) H s_i + w_t + z_o; consumes the CP, returns NM samples.
CVec receive_chain(const CVec& impaired_with_cp, const ChannelRealization& h,
                   const HardwareProfile& hw, double signal_power,
                   Eigen::Index cp_len, RngStream& rng);

}  // namespace ddlink
