#include "ddlink/detector.hpp"

#include <cmath>

#include "ddlink/errors.hpp"

namespace ddlink {

namespace {

constexpr double kDiagClamp = 1e-9;

double clamp_diag(double v) {
  if (v < kDiagClamp) return kDiagClamp;
  if (v > 1.0 - kDiagClamp) return 1.0 - kDiagClamp;
  return v;
}

}  // namespace

CVec cancel_pilot(const CVec& received, const CMat& h_hat,
                  const CVec& pilot_time, const HardwareProfile& hw) {
  if (received.size() != h_hat.rows() || h_hat.cols() != pilot_time.size())
    throw DimensionError("cancel_pilot: dimension mismatch");
  return received - hw.combined_amplitude() * (h_hat * pilot_time);
}

CMat detector_noise_covariance(const OtfsParams& params, const BemConfig& bem,
                               const ChannelProfile& profile,
                               const HardwareProfile& hw,
                               const PowerMatrices& powers,
                               const CMat& error_cov,
                               const ModelingErrorReport* modeling) {
  const Eigen::Index nm = params.frame_size();
  const Eigen::Index taps = profile.num_taps();
  CMat f = dd_transform(params.delay_bins, params.doppler_bins);
  RVec phi = powers.total();
  CMat r_s = f.adjoint() * phi.asDiagonal() * f;  // E{s s^H}

  CMat acc = CMat::Zero(nm, nm);

  if (error_cov.size() > 0) {
    // Coefficient-error term: tap-error cross covariance at (t1, t2) times
    // the signal covariance at the matching delayed sample pair.
    const Eigen::Index nb = bem.num_basis();
    CMat w(nb, nb);
    for (Eigen::Index l1 = 0; l1 < taps; ++l1) {
      for (Eigen::Index l2 = 0; l2 < taps; ++l2) {
        for (Eigen::Index q1 = 0; q1 < nb; ++q1)
          for (Eigen::Index q2 = 0; q2 < nb; ++q2)
            w(q1, q2) = error_cov(q1 * taps + l1, q2 * taps + l2);
        CMat tap_cov = bem.basis * w * bem.basis.adjoint();
        for (Eigen::Index t2 = 0; t2 < nm; ++t2) {
          Eigen::Index c = (t2 - l2 + nm) % nm;
          for (Eigen::Index t1 = 0; t1 < nm; ++t1)
            acc(t1, t2) += tap_cov(t1, t2) * r_s((t1 - l1 + nm) % nm, c);
        }
      }
    }
  }

  if (modeling != nullptr) {
    for (Eigen::Index l = 0; l < taps; ++l) {
      const CMat& re = modeling->per_path_cov[l];
      for (Eigen::Index t2 = 0; t2 < nm; ++t2) {
        Eigen::Index c = (t2 - l + nm) % nm;
        for (Eigen::Index t1 = 0; t1 < nm; ++t1)
          acc(t1, t2) += re(t1, t2) * r_s((t1 - l + nm) % nm, c);
      }
    }
  }

  DistortionVariances v =
      distortion_variances(hw, powers.mean_power(), profile.total_power());
  double white = hw.rx_quality * v.tx * profile.total_power() + hw.awgn_var +
                 v.rx;
  CMat r_n = hw.combined_gain() * acc;
  r_n += white * CMat::Identity(nm, nm);
  return 0.5 * (r_n + r_n.adjoint().eval());
}

Detection mmse_detect(const CVec& r_hat, const CMat& h_hat, const CMat& r_sd,
                      const CMat& r_n, const HardwareProfile& hw) {
  const Eigen::Index nm = r_hat.size();
  if (h_hat.rows() != nm || r_sd.rows() != nm || r_n.rows() != nm)
    throw DimensionError("mmse_detect: dimension mismatch");
  const double gain = hw.combined_gain();
  CMat innovation = gain * (h_hat * r_sd * h_hat.adjoint()) + r_n;
  innovation = 0.5 * (innovation + innovation.adjoint().eval());
  double ridge0 = 1e-12 * innovation.real().trace() / nm;
  // G_t^H = S^{-1} H_hat R_sd, both R_sd and S Hermitian.
  CMat gt_h = hermitian_solve(innovation, h_hat * r_sd, ridge0);
  Detection det;
  det.gain = hw.combined_amplitude() * gt_h.adjoint();
  det.data_time = det.gain * r_hat;
  return det;
}

CMat effective_matrix(const CMat& g_t, const CMat& h_true,
                      const OtfsParams& params, const HardwareProfile& hw) {
  CMat f = dd_transform(params.delay_bins, params.doppler_bins);
  return hw.combined_amplitude() * f * g_t * h_true * f.adjoint();
}

RVec sinr_per_symbol(const CMat& t, const std::vector<Eigen::Index>& cells) {
  RVec diag = t.diagonal().real();
  return sinr_from_diagonal(diag, cells);
}

RVec sinr_from_diagonal(const RVec& t_diag,
                        const std::vector<Eigen::Index>& cells) {
  RVec out(static_cast<Eigen::Index>(cells.size()));
  for (std::size_t i = 0; i < cells.size(); ++i) {
    double d = clamp_diag(t_diag(cells[i]));
    out(static_cast<Eigen::Index>(i)) = d / (1.0 - d);
  }
  return out;
}

BerTheory theoretical_ber(const RVec& t_diag,
                          const std::vector<Eigen::Index>& cells,
                          const ModulationSpec& mod) {
  BerTheory ber;
  double mean_diag = 0.0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    double d = clamp_diag(t_diag(cells[i]));
    double sinr = d / (1.0 - d);
    ber.average += mod.ber_coeff_a * std::erfc(std::sqrt(mod.ber_coeff_b * sinr));
    mean_diag += d;
  }
  ber.average /= static_cast<double>(cells.size());
  mean_diag = clamp_diag(mean_diag / static_cast<double>(cells.size()));
  double sinr_mean = mean_diag / (1.0 - mean_diag);
  ber.lower_bound =
      mod.ber_coeff_a * std::erfc(std::sqrt(mod.ber_coeff_b * sinr_mean));
  return ber;
}

ErrorCount count_errors(const std::vector<std::uint8_t>& tx,
                        const std::vector<std::uint8_t>& rx) {
  if (tx.size() != rx.size())
    throw DimensionError("count_errors: bit stream length mismatch");
  ErrorCount count;
  count.bits_total = static_cast<long>(tx.size());
  for (std::size_t i = 0; i < tx.size(); ++i)
    if ((tx[i] ^ rx[i]) & 1) ++count.bit_errors;
  return count;
}

}  // namespace ddlink
