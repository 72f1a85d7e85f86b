#pragma once

#include <utility>
#include <vector>

#include "ddlink/channel.hpp"
#include "ddlink/frame.hpp"
#include "ddlink/linalg.hpp"

namespace ddlink {

// Complex-exponential basis expansion of the tap trajectories. The model for
// tap l is h_l[t] ~ sum_q c_q[l] exp(j w_q t) with modeling frequencies
// w_q = 2 pi (q - ceil(Q/2)) / (M N R). resolution = 1 is the critically
// sampled special case with an orthogonal basis.
//
// Stacking conventions, shared by every consumer:
//   * CIR vectors are time-major with the path index fastest,
//     h[t*(L+1) + l] = h_l[t], so h ~ (B (x) I_{L+1}) c;
//   * coefficient vectors are order-major with the path index fastest,
//     c[q*(L+1) + l] = c_q[l].
struct BemConfig {
  int resolution = 2;          // R
  int order = 0;               // Q_L
  Eigen::Index frame_size = 0; // NM
  RVec freqs;                  // w_q, rad/sample
  CMat basis;                  // NM x (Q_L + 1)

  Eigen::Index num_basis() const { return order + 1; }

  // 2 * ceil(R * N * f_max / delta_f).
  static int derive_order(Eigen::Index doppler_bins, double max_doppler_hz,
                          double subcarrier_spacing_hz, int resolution);
  static BemConfig build(const OtfsParams& params, double max_doppler_hz,
                         int resolution);
  static BemConfig build_with_order(Eigen::Index frame_size, int order,
                                    int resolution);
};

// (Q_S, Q_L) for the critically sampled and oversampled models.
std::pair<int, int> derive_orders(const OtfsParams& params,
                                  const ChannelProfile& profile,
                                  int resolution);

struct BemCoefficients {
  CVec stacked;  // (Q_L+1)(L+1), order-major / path-inner
  Eigen::Index num_basis = 0;
  Eigen::Index num_taps = 0;

  cxd& at(Eigen::Index q, Eigen::Index l) {
    return stacked(q * num_taps + l);
  }
  cxd at(Eigen::Index q, Eigen::Index l) const {
    return stacked(q * num_taps + l);
  }
  static BemCoefficients zero(const BemConfig& bem, Eigen::Index num_taps);
};

// Per-path least squares c_{.,l} = argmin ||h_l - B c||, solved by QR.
BemCoefficients fit_coefficients(const ChannelRealization& h,
                                 const BemConfig& bem);

// Tap trajectories implied by coefficients: gains(l, t) = sum_q c_q[l] b_q[t].
ChannelRealization bem_tap_gains(const BemCoefficients& c, const BemConfig& bem);

// Dense NM x NM time-varying convolution matrix of the modeled channel.
CMat reconstruct_channel(const BemCoefficients& c, const BemConfig& bem);

// Orthogonal projector onto the complement of span(basis).
CMat projection_complement(const BemConfig& bem);

// Thin orthonormal basis Q1 of span(basis); G = I - Q1 Q1^H.
CMat basis_orthonormal(const BemConfig& bem);

struct ModelingErrorReport {
  double total_mse = 0.0;            // sum_l trace(G R_{h,l})
  std::vector<CMat> per_path_cov;    // G R_{h,l} G
};

ModelingErrorReport modeling_error(const BemConfig& bem,
                                   const ChannelProfile& profile);

// As modeling_error but skips the per-path covariance matrices.
double modeling_error_total(const BemConfig& bem, const ChannelProfile& profile);

// (B (x) I_{L+1}): maps stacked coefficients to time-major CIR vectors.
CMat coeff_to_cir_map(const BemConfig& bem, Eigen::Index num_taps);

// Permutation P with (I_{L+1} (x) B) P == S_h (B (x) I_{L+1}), where S_h
// reorders CIR vectors from time-major to path-major. P^H P = I.
CMat bem_permutation(const BemConfig& bem, Eigen::Index num_taps);

// Path-major reordering S_h of CIR vectors (time-major in, path-major out).
CMat cir_path_major_map(const BemConfig& bem, Eigen::Index num_taps);

}  // namespace ddlink
