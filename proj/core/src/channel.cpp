#include "ddlink/channel.hpp"

#include <cmath>
#include <numbers>

#include "ddlink/errors.hpp"

namespace ddlink {

double max_doppler_from_speed(double carrier_freq_hz, double speed_mps) {
  return carrier_freq_hz * speed_mps / kPropagationSpeed;
}

double ChannelProfile::total_power() const {
  double sum = 0.0;
  for (double p : path_powers) sum += p;
  return sum;
}

ChannelProfile ChannelProfile::uniform(Eigen::Index num_taps,
                                       double max_doppler_hz,
                                       double sample_interval_s) {
  ChannelProfile profile;
  profile.path_powers.assign(num_taps, 1.0 / static_cast<double>(num_taps));
  profile.max_doppler_hz = max_doppler_hz;
  profile.sample_interval_s = sample_interval_s;
  profile.validate();
  return profile;
}

void ChannelProfile::validate() const {
  if (path_powers.empty()) throw ConfigError("ChannelProfile: no paths");
  for (double p : path_powers)
    if (p < 0.0) throw ConfigError("ChannelProfile: negative path power");
  if (std::abs(total_power() - 1.0) > 1e-12)
    throw ModelError("ChannelProfile: path powers must sum to 1");
  if (max_doppler_hz < 0.0 || sample_interval_s <= 0.0)
    throw ConfigError("ChannelProfile: invalid Doppler or sample interval");
}

HermitianPsd jakes_covariance(const ChannelProfile& profile, Eigen::Index size,
                              Eigen::Index path) {
  if (path < 0 || path >= profile.num_taps())
    throw DimensionError("jakes_covariance: path index out of range");
  const double power = profile.path_powers[path];
  const double w = 2.0 * std::numbers::pi * profile.max_doppler_hz *
                   profile.sample_interval_s;
  CMat r(size, size);
  std::vector<double> row(size);
  for (Eigen::Index lag = 0; lag < size; ++lag)
    row[lag] = power * std::cyl_bessel_j(0, w * static_cast<double>(lag));
  for (Eigen::Index m = 0; m < size; ++m)
    for (Eigen::Index n = 0; n < size; ++n) r(m, n) = row[std::abs(m - n)];
  return HermitianPsd(std::move(r));
}

ChannelSampler::ChannelSampler(const ChannelProfile& profile,
                               Eigen::Index frame_size)
    : profile_(profile), frame_size_(frame_size) {
  profile_.validate();
  ChannelProfile unit = profile_;
  unit.path_powers.assign(1, 1.0);
  unit_factor_ = jakes_covariance(unit, frame_size, 0).sqrt_factor();
}

ChannelRealization ChannelSampler::sample(RngStream& rng) const {
  ChannelRealization h;
  h.gains.resize(profile_.num_taps(), frame_size_);
  CVec z(unit_factor_.cols());
  for (Eigen::Index l = 0; l < profile_.num_taps(); ++l) {
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.complex_normal();
    h.gains.row(l) =
        std::sqrt(profile_.path_powers[l]) * (unit_factor_ * z).transpose();
  }
  return h;
}

CVec apply_channel(const ChannelRealization& h, const CVec& with_cp,
                   Eigen::Index cp_len) {
  const Eigen::Index taps = h.num_taps();
  const Eigen::Index nm = h.frame_size();
  if (cp_len < taps - 1)
    throw ConfigError("apply_channel: cyclic prefix shorter than the channel");
  if (with_cp.size() != nm + cp_len)
    throw DimensionError("apply_channel: signal length mismatch");
  CVec out = CVec::Zero(nm);
  for (Eigen::Index t = 0; t < nm; ++t) {
    cxd acc = 0.0;
    for (Eigen::Index l = 0; l < taps; ++l)
      acc += h.gains(l, t) * with_cp(t + cp_len - l);
    out(t) = acc;
  }
  return out;
}

CMat channel_matrix(const ChannelRealization& h) {
  const Eigen::Index nm = h.frame_size();
  CMat out = CMat::Zero(nm, nm);
  for (Eigen::Index t = 0; t < nm; ++t)
    for (Eigen::Index l = 0; l < h.num_taps(); ++l)
      out(t, (t - l + nm) % nm) = h.gains(l, t);
  return out;
}

CVec stack_time_major(const ChannelRealization& h) {
  const Eigen::Index taps = h.num_taps();
  CVec out(taps * h.frame_size());
  for (Eigen::Index t = 0; t < h.frame_size(); ++t)
    for (Eigen::Index l = 0; l < taps; ++l) out(t * taps + l) = h.gains(l, t);
  return out;
}

}  // namespace ddlink
