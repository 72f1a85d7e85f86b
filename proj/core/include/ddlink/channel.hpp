#pragma once

#include <vector>

#include "ddlink/frame.hpp"
#include "ddlink/linalg.hpp"

namespace ddlink {

// Nominal propagation speed used to derive the maximum Doppler shift.
inline constexpr double kPropagationSpeed = 3.0e8;  // m/s

double max_doppler_from_speed(double carrier_freq_hz, double speed_mps);

// Wide-sense stationary uncorrelated-scattering multipath profile with a
// Jakes Doppler spectrum shared by all paths.
struct ChannelProfile {
  std::vector<double> path_powers;  // sigma_l^2, sums to 1
  double max_doppler_hz = 0.0;      // f_max
  double sample_interval_s = 0.0;   // T_s

  Eigen::Index num_taps() const {
    return static_cast<Eigen::Index>(path_powers.size());
  }
  Eigen::Index max_delay() const { return num_taps() - 1; }  // L
  double total_power() const;

  static ChannelProfile uniform(Eigen::Index num_taps, double max_doppler_hz,
                                double sample_interval_s);
  void validate() const;
};

// Tap autocorrelation R[m,n] = sigma_l^2 J0(2 pi f_max |m-n| T_s).
HermitianPsd jakes_covariance(const ChannelProfile& profile, Eigen::Index size,
                              Eigen::Index path);

// One sampled CIR: gains(l, t) = h_l[t], taps x frame samples.
struct ChannelRealization {
  CMat gains;

  Eigen::Index num_taps() const { return gains.rows(); }
  Eigen::Index frame_size() const { return gains.cols(); }
};

// Draws realizations with exact Jakes second-order statistics. One truncated
// factor of the unit-power Toeplitz covariance is shared by all paths.
class ChannelSampler {
 public:
  ChannelSampler(const ChannelProfile& profile, Eigen::Index frame_size);

  ChannelRealization sample(RngStream& rng) const;
  const ChannelProfile& profile() const { return profile_; }

 private:
  ChannelProfile profile_;
  Eigen::Index frame_size_;
  CMat unit_factor_;  // frame_size x rank
};

// Applies the time-varying channel to a CP-prefixed signal:
// out[t] = sum_l h_l[t] s_cp[t + cp_len - l], t in [0, NM).
CVec apply_channel(const ChannelRealization& h, const CVec& with_cp,
                   Eigen::Index cp_len);

// Dense NM x NM matrix with H[t, (t-l) mod NM] = h_l[t].
CMat channel_matrix(const ChannelRealization& h);

// Full CIR stacked time-major with the path index running fastest:
// h[t*(L+1) + l] = h_l[t].
CVec stack_time_major(const ChannelRealization& h);

}  // namespace ddlink
