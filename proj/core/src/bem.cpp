#include "ddlink/bem.hpp"

#include <cmath>
#include <numbers>

#include "ddlink/errors.hpp"

namespace ddlink {

int BemConfig::derive_order(Eigen::Index doppler_bins, double max_doppler_hz,
                            double subcarrier_spacing_hz, int resolution) {
  if (resolution < 1) throw ConfigError("BemConfig: resolution must be >= 1");
  double x = static_cast<double>(resolution) *
             static_cast<double>(doppler_bins) * max_doppler_hz /
             subcarrier_spacing_hz;
  return 2 * static_cast<int>(std::ceil(x));
}

BemConfig BemConfig::build(const OtfsParams& params, double max_doppler_hz,
                           int resolution) {
  int order = derive_order(params.doppler_bins, max_doppler_hz,
                           params.subcarrier_spacing_hz, resolution);
  BemConfig bem = build_with_order(params.frame_size(), order, resolution);
  return bem;
}

BemConfig BemConfig::build_with_order(Eigen::Index frame_size, int order,
                                      int resolution) {
  if (resolution < 1) throw ConfigError("BemConfig: resolution must be >= 1");
  if (order < 0) throw ConfigError("BemConfig: negative order");
  if (order + 1 > frame_size)
    throw ConfigError("BemConfig: order + 1 exceeds the frame size");
  BemConfig bem;
  bem.resolution = resolution;
  bem.order = order;
  bem.frame_size = frame_size;
  bem.freqs.resize(order + 1);
  bem.basis.resize(frame_size, order + 1);
  const double base = 2.0 * std::numbers::pi /
                      (static_cast<double>(frame_size) * resolution);
  const int center = (order + 1) / 2;  // ceil(Q/2)
  for (int q = 0; q <= order; ++q) {
    bem.freqs(q) = base * (q - center);
    for (Eigen::Index t = 0; t < frame_size; ++t)
      bem.basis(t, q) = std::polar(1.0, bem.freqs(q) * static_cast<double>(t));
  }
  return bem;
}

std::pair<int, int> derive_orders(const OtfsParams& params,
                                  const ChannelProfile& profile,
                                  int resolution) {
  int q_s = BemConfig::derive_order(params.doppler_bins, profile.max_doppler_hz,
                                    params.subcarrier_spacing_hz, 1);
  int q_l = BemConfig::derive_order(params.doppler_bins, profile.max_doppler_hz,
                                    params.subcarrier_spacing_hz, resolution);
  return {q_s, q_l};
}

BemCoefficients BemCoefficients::zero(const BemConfig& bem,
                                      Eigen::Index num_taps) {
  BemCoefficients c;
  c.num_basis = bem.num_basis();
  c.num_taps = num_taps;
  c.stacked = CVec::Zero(c.num_basis * num_taps);
  return c;
}

BemCoefficients fit_coefficients(const ChannelRealization& h,
                                 const BemConfig& bem) {
  if (h.frame_size() != bem.frame_size)
    throw DimensionError("fit_coefficients: frame size mismatch");
  Eigen::ColPivHouseholderQR<CMat> qr(bem.basis);
  if (qr.rank() < bem.num_basis())
    throw SingularMatrixError("fit_coefficients: basis is rank deficient",
                              std::numeric_limits<double>::infinity());
  // Solve all taps at once: columns of RHS are the tap trajectories.
  CMat rhs = h.gains.transpose();              // NM x (L+1)
  CMat coef = qr.solve(rhs);                   // (Q+1) x (L+1)
  BemCoefficients c;
  c.num_basis = bem.num_basis();
  c.num_taps = h.num_taps();
  c.stacked.resize(c.num_basis * c.num_taps);
  for (Eigen::Index q = 0; q < c.num_basis; ++q)
    for (Eigen::Index l = 0; l < c.num_taps; ++l)
      c.stacked(q * c.num_taps + l) = coef(q, l);
  return c;
}

ChannelRealization bem_tap_gains(const BemCoefficients& c,
                                 const BemConfig& bem) {
  ChannelRealization h;
  h.gains = CMat::Zero(c.num_taps, bem.frame_size);
  for (Eigen::Index q = 0; q < c.num_basis; ++q)
    for (Eigen::Index l = 0; l < c.num_taps; ++l)
      h.gains.row(l) += c.at(q, l) * bem.basis.col(q).transpose();
  return h;
}

CMat reconstruct_channel(const BemCoefficients& c, const BemConfig& bem) {
  return channel_matrix(bem_tap_gains(c, bem));
}

CMat basis_orthonormal(const BemConfig& bem) {
  Eigen::HouseholderQR<CMat> qr(bem.basis);
  CMat q = qr.householderQ() * CMat::Identity(bem.frame_size, bem.num_basis());
  return q;
}

CMat projection_complement(const BemConfig& bem) {
  CMat q1 = basis_orthonormal(bem);
  return CMat::Identity(bem.frame_size, bem.frame_size) - q1 * q1.adjoint();
}

ModelingErrorReport modeling_error(const BemConfig& bem,
                                   const ChannelProfile& profile) {
  ModelingErrorReport report;
  CMat q1 = basis_orthonormal(bem);
  report.per_path_cov.reserve(profile.num_taps());
  for (Eigen::Index l = 0; l < profile.num_taps(); ++l) {
    CMat r = jakes_covariance(profile, bem.frame_size, l).matrix();
    // G R G with G = I - Q1 Q1^H, expanded to rank-(Q+1) updates.
    CMat qhr = q1.adjoint() * r;                    // (Q+1) x NM
    CMat qhrq = qhr * q1;                           // (Q+1) x (Q+1)
    CMat grg = r - q1 * qhr - qhr.adjoint() * q1.adjoint() + q1 * qhrq * q1.adjoint();
    report.total_mse += grg.real().trace();
    report.per_path_cov.push_back(std::move(grg));
  }
  return report;
}

double modeling_error_total(const BemConfig& bem,
                            const ChannelProfile& profile) {
  CMat q1 = basis_orthonormal(bem);
  double total = 0.0;
  for (Eigen::Index l = 0; l < profile.num_taps(); ++l) {
    CMat r = jakes_covariance(profile, bem.frame_size, l).matrix();
    total += r.real().trace() - (q1.adjoint() * r * q1).real().trace();
  }
  return total;
}

CMat coeff_to_cir_map(const BemConfig& bem, Eigen::Index num_taps) {
  return kron(bem.basis, CMat::Identity(num_taps, num_taps));
}

CMat bem_permutation(const BemConfig& bem, Eigen::Index num_taps) {
  const Eigen::Index nb = bem.num_basis();
  CMat p = CMat::Zero(nb * num_taps, nb * num_taps);
  for (Eigen::Index q = 0; q < nb; ++q)
    for (Eigen::Index l = 0; l < num_taps; ++l)
      p(l * nb + q, q * num_taps + l) = 1.0;
  return p;
}

CMat cir_path_major_map(const BemConfig& bem, Eigen::Index num_taps) {
  const Eigen::Index nm = bem.frame_size;
  CMat s = CMat::Zero(num_taps * nm, num_taps * nm);
  for (Eigen::Index t = 0; t < nm; ++t)
    for (Eigen::Index l = 0; l < num_taps; ++l)
      s(l * nm + t, t * num_taps + l) = 1.0;
  return s;
}

}  // namespace ddlink
