#pragma once

#include <vector>

#include "ddlink/bem.hpp"
#include "ddlink/channel.hpp"
#include "ddlink/frame.hpp"
#include "ddlink/impairments.hpp"
#include "ddlink/linalg.hpp"

namespace ddlink {

// Deterministic pilot observation operator. Columns of a_p are indexed like
// the coefficient vector (order-major, path-inner); column (q,l) is
// F diag(b_q) shift_l(s_p). The extraction operator E selects the
// delay-Doppler cells the pilot diffuses into: delays [l_p, l_p+L], Doppler
// [k_p - Q_L/2, k_p + Q_L/2], rows ordered delay-major.
struct PilotOperator {
  CMat a_p;                                     // NM x n_c
  CMat observed_a_p;                            // n_obs x n_c, E A_p
  std::vector<Eigen::Index> observation_cells;  // DD indices, delay-major
  CVec pilot_time;                              // s_p, length NM

  Eigen::Index num_observations() const {
    return static_cast<Eigen::Index>(observation_cells.size());
  }
  CVec extract(const CVec& y) const;  // E y
  CMat extract_rows(const CMat& x) const;
};

PilotOperator build_pilot_operator(const OtfsParams& params,
                                   const PilotConfig& pilot,
                                   const BemConfig& bem);

// V_q = F diag(b_q) F_MN^H.
CMat basis_doppler_operator(const OtfsParams& params, const BemConfig& bem,
                            int q);

// Diagonal symbol-power matrices. The data power map zeroes delays
// [l_p-L, l_p+L] and Doppler [k_p-Q_L, k_p+Q_L] around the pilot and holds
// sigma_d^2 elsewhere; the pilot map holds sigma_p^2 at the pilot cell.
struct PowerMatrices {
  RVec data_gamma;   // NM
  RVec pilot_diag;   // NM
  RVec total() const { return data_gamma + pilot_diag; }
  double mean_power() const {
    return (data_gamma.sum() + pilot_diag.sum()) / data_gamma.size();
  }
};

PowerMatrices data_power_matrix(const OtfsParams& params,
                                const PilotConfig& pilot, int order_gce);

// Prior covariance of the stacked coefficients. Cross-path entries vanish;
// block (q1,q2) is basis_cross(q1,q2) * diag(path powers).
struct CoefficientPrior {
  CMat full;         // n_c x n_c
  CMat basis_cross;  // (Q+1) x (Q+1), from the unit-power tap covariance
  std::vector<double> path_powers;

  CMat block(Eigen::Index q1, Eigen::Index q2) const;
};

CoefficientPrior coefficient_prior(const BemConfig& bem,
                                   const ChannelProfile& profile);

// Covariance of the data-interference term A_d c (DD domain, NM x NM).
CMat interference_covariance(const OtfsParams& params, const BemConfig& bem,
                             const CoefficientPrior& prior,
                             const PowerMatrices& powers);

// Covariance of F E_mod s (DD domain, NM x NM).
CMat modeling_noise_covariance(const OtfsParams& params,
                               const PowerMatrices& powers,
                               const ModelingErrorReport& modeling);

// Noise-plus-interference covariance of the extracted observation,
// dimension n_obs x n_obs: quality-scaled data interference and modeling
// noise plus the white term (xi_o sigma_zi^2 sum sigma_l^2 + sigma_w^2 +
// sigma_zo^2) I.
CMat noise_covariance(const OtfsParams& params, const BemConfig& bem,
                      const ChannelProfile& profile,
                      const HardwareProfile& hw, const PilotOperator& op,
                      const CoefficientPrior& prior,
                      const PowerMatrices& powers,
                      const ModelingErrorReport& modeling);

struct WienerEstimator {
  CMat gain_d;     // n_c x n_obs
  CMat shrink_k;   // n_c x n_c, I - xi_o xi_i D E A_p
  CMat error_cov;  // R_ct
};

// D, K and the coefficient error covariance R_ct = K R_c K^H +
// xi_o xi_i D R_z D^H.
WienerEstimator error_covariance(const PilotOperator& op,
                                 const CoefficientPrior& prior, const CMat& r_z,
                                 const HardwareProfile& hw);

struct MseBreakdown {
  double estimation = 0.0;  // trace(Omega R_ct Omega^H) / (MN(L+1))
  double modeling = 0.0;    // sum_l trace(G R_{h,l}) / (MN(L+1))
  double total = 0.0;
};

MseBreakdown theoretical_mse(const BemConfig& bem, const CMat& error_cov,
                             double modeling_total, Eigen::Index num_taps);

// Everything the per-trial estimator needs, built once per configuration.
struct EstimatorContext {
  OtfsParams params;
  PilotConfig pilot;
  BemConfig bem;
  ChannelProfile profile;
  HardwareProfile hw;
  PilotOperator op;
  PowerMatrices powers;
  CoefficientPrior prior;
  ModelingErrorReport modeling;
  double signal_power = 0.0;  // trace(Phi)/NM
  CMat r_z;
  WienerEstimator wiener;
  MseBreakdown mse;
};

EstimatorContext build_estimator_context(const OtfsParams& params,
                                         const PilotConfig& pilot,
                                         const BemConfig& bem,
                                         const ChannelProfile& profile,
                                         const HardwareProfile& hw);

// c_hat = sqrt(xi_o xi_i) D (E y).
BemCoefficients mmse_estimate(const CVec& y_dd, const EstimatorContext& ctx);

}  // namespace ddlink
