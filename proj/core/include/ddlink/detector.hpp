#pragma once

#include <cstdint>
#include <vector>

#include "ddlink/estimator.hpp"

namespace ddlink {

// r_hat = r_o - sqrt(xi_o xi_i) H_hat s_p.
CVec cancel_pilot(const CVec& received, const CMat& h_hat,
                  const CVec& pilot_time, const HardwareProfile& hw);

// Estimation-error-plus-noise covariance R_n (time domain, NM x NM):
// quality-scaled coefficient-error and modeling terms plus the white term.
// Pass an empty error_cov for perfect channel knowledge (both structured
// terms vanish).
CMat detector_noise_covariance(const OtfsParams& params, const BemConfig& bem,
                               const ChannelProfile& profile,
                               const HardwareProfile& hw,
                               const PowerMatrices& powers,
                               const CMat& error_cov,
                               const ModelingErrorReport* modeling);

struct Detection {
  CVec data_time;  // s_d estimate
  CMat gain;       // G_t
};

// G_t = sqrt(xi) R_sd H_hat^H (xi H_hat R_sd H_hat^H + R_n)^{-1}, applied to
// the pilot-cancelled vector. Dense reference path; the link runner uses a
// structured equivalent.
Detection mmse_detect(const CVec& r_hat, const CMat& h_hat, const CMat& r_sd,
                      const CMat& r_n, const HardwareProfile& hw);

// T = sqrt(xi_o xi_i) F G_t H_t F^H with the true channel.
CMat effective_matrix(const CMat& g_t, const CMat& h_true,
                      const OtfsParams& params, const HardwareProfile& hw);

// SINR[i] = Re T[i,i] / (1 - Re T[i,i]), diagonals clamped to
// (1e-9, 1 - 1e-9).
RVec sinr_per_symbol(const CMat& t, const std::vector<Eigen::Index>& cells);
RVec sinr_from_diagonal(const RVec& t_diag,
                        const std::vector<Eigen::Index>& cells);

struct BerTheory {
  double average = 0.0;      // mean of a*erfc(sqrt(b*SINR_i))
  double lower_bound = 0.0;  // Jensen bound through the mean diagonal
};

BerTheory theoretical_ber(const RVec& t_diag,
                          const std::vector<Eigen::Index>& cells,
                          const ModulationSpec& mod);

struct ErrorCount {
  long bit_errors = 0;
  long bits_total = 0;
};

ErrorCount count_errors(const std::vector<std::uint8_t>& tx,
                        const std::vector<std::uint8_t>& rx);

}  // namespace ddlink
