#include "ddlink/impairments.hpp"

#include <cmath>

#include "ddlink/errors.hpp"

namespace ddlink {

double HardwareProfile::combined_amplitude() const {
  return std::sqrt(tx_quality * rx_quality);
}

void HardwareProfile::validate() const {
  if (tx_quality <= 0.0 || tx_quality > 1.0 || rx_quality <= 0.0 ||
      rx_quality > 1.0)
    throw ConfigError("HardwareProfile: quality factors must lie in (0, 1]");
  if (awgn_var < 0.0) throw ConfigError("HardwareProfile: negative AWGN variance");
}

DistortionVariances distortion_variances(const HardwareProfile& hw,
                                         double signal_power,
                                         double channel_gain) {
  DistortionVariances v;
  v.tx = (1.0 - hw.tx_quality) * signal_power;
  v.rx = (1.0 - hw.rx_quality) * (hw.tx_quality * signal_power + v.tx) *
         channel_gain;
  return v;
}

namespace {

void add_white_noise(CVec& x, double variance, RngStream& rng) {
  if (variance <= 0.0) return;
  const double amp = std::sqrt(variance);
  for (Eigen::Index i = 0; i < x.size(); ++i)
    x(i) += amp * rng.complex_normal();
}

}  // namespace

CVec impair_transmit(const CVec& with_cp, const HardwareProfile& hw,
                     double signal_power, RngStream& rng) {
  DistortionVariances v = distortion_variances(hw, signal_power);
  CVec out = std::sqrt(hw.tx_quality) * with_cp;
  add_white_noise(out, v.tx, rng);
  return out;
}

CVec receive_chain(const CVec& impaired_with_cp, const ChannelRealization& h,
                   const HardwareProfile& hw, double signal_power,
                   Eigen::Index cp_len, RngStream& rng) {
  // Channel gain is 1 by the profile invariant (path powers sum to 1).
  DistortionVariances v = distortion_variances(hw, signal_power, 1.0);
  CVec out = apply_channel(h, impaired_with_cp, cp_len);
  out *= std::sqrt(hw.rx_quality);
  add_white_noise(out, hw.awgn_var, rng);
  add_white_noise(out, v.rx, rng);
  return out;
}

}  // namespace ddlink
