#include "ddlink/estimator.hpp"

#include <cmath>

#include "ddlink/errors.hpp"

namespace ddlink {

namespace {

// shift_l(s)[t] = s[(t - l) mod n]
CVec circular_shift(const CVec& s, Eigen::Index l) {
  const Eigen::Index n = s.size();
  CVec out(n);
  for (Eigen::Index t = 0; t < n; ++t) out(t) = s((t - l % n + n) % n);
  return out;
}

// A with entries A[t1,t2] = base[(t1-l1) mod n, (t2-l2) mod n].
CMat shifted(const CMat& base, Eigen::Index l1, Eigen::Index l2) {
  const Eigen::Index n = base.rows();
  CMat out(n, n);
  for (Eigen::Index t2 = 0; t2 < n; ++t2) {
    Eigen::Index c = (t2 - l2 % n + n) % n;
    for (Eigen::Index t1 = 0; t1 < n; ++t1)
      out(t1, t2) = base((t1 - l1 % n + n) % n, c);
  }
  return out;
}

}  // namespace

CVec PilotOperator::extract(const CVec& y) const {
  CVec out(num_observations());
  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = y(observation_cells[i]);
  return out;
}

CMat PilotOperator::extract_rows(const CMat& x) const {
  CMat out(num_observations(), x.cols());
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    out.row(i) = x.row(observation_cells[i]);
  return out;
}

PilotOperator build_pilot_operator(const OtfsParams& params,
                                   const PilotConfig& pilot,
                                   const BemConfig& bem) {
  pilot.validate(params);
  const Eigen::Index nm = params.frame_size();
  if (bem.frame_size != nm)
    throw DimensionError("build_pilot_operator: basis frame size mismatch");
  const Eigen::Index taps = pilot.guard_delay + 1;  // L + 1
  const Eigen::Index nb = bem.num_basis();
  const Eigen::Index half = bem.order / 2;

  PilotOperator op;
  op.pilot_time = strip_cp(modulate(pilot_frame(params, pilot), params),
                           params.cp_len);

  if (pilot.pilot_doppler - half < 0 ||
      pilot.pilot_doppler + half >= params.doppler_bins)
    throw ConfigError("build_pilot_operator: observation region out of bounds");
  op.observation_cells.reserve(taps * nb);
  for (Eigen::Index m = pilot.pilot_delay; m <= pilot.pilot_delay + pilot.guard_delay; ++m)
    for (Eigen::Index k = pilot.pilot_doppler - half;
         k <= pilot.pilot_doppler + half; ++k)
      op.observation_cells.push_back(k * params.delay_bins + m);

  op.a_p.resize(nm, nb * taps);
  CVec col(nm);
  for (Eigen::Index q = 0; q < nb; ++q) {
    for (Eigen::Index l = 0; l < taps; ++l) {
      col = bem.basis.col(q).cwiseProduct(circular_shift(op.pilot_time, l));
      op.a_p.col(q * taps + l) = demodulate(col, params);
    }
  }
  op.observed_a_p = op.extract_rows(op.a_p);
  return op;
}

CMat basis_doppler_operator(const OtfsParams& params, const BemConfig& bem,
                            int q) {
  const Eigen::Index nm = params.frame_size();
  CMat f = dd_transform(params.delay_bins, params.doppler_bins);
  CMat f_mn = dft_matrix(nm);
  return f * bem.basis.col(q).asDiagonal() * f_mn.adjoint();
}

PowerMatrices data_power_matrix(const OtfsParams& params,
                                const PilotConfig& pilot, int order_gce) {
  const Eigen::Index nm = params.frame_size();
  PowerMatrices p;
  p.data_gamma = RVec::Constant(nm, pilot.data_power);
  p.pilot_diag = RVec::Zero(nm);
  for (Eigen::Index k = 0; k < params.doppler_bins; ++k) {
    for (Eigen::Index m = 0; m < params.delay_bins; ++m) {
      bool zero_doppler = std::abs(k - pilot.pilot_doppler) <= order_gce;
      bool zero_delay = std::abs(m - pilot.pilot_delay) <= pilot.guard_delay;
      if (zero_doppler && zero_delay) p.data_gamma(k * params.delay_bins + m) = 0.0;
    }
  }
  p.pilot_diag(pilot.pilot_doppler * params.delay_bins + pilot.pilot_delay) =
      pilot.pilot_power;
  return p;
}

CMat CoefficientPrior::block(Eigen::Index q1, Eigen::Index q2) const {
  const Eigen::Index taps = static_cast<Eigen::Index>(path_powers.size());
  CMat b = CMat::Zero(taps, taps);
  for (Eigen::Index l = 0; l < taps; ++l)
    b(l, l) = basis_cross(q1, q2) * path_powers[l];
  return b;
}

CoefficientPrior coefficient_prior(const BemConfig& bem,
                                   const ChannelProfile& profile) {
  CoefficientPrior prior;
  prior.path_powers = profile.path_powers;
  ChannelProfile unit = profile;
  unit.path_powers.assign(1, 1.0);
  CMat r_unit = jakes_covariance(unit, bem.frame_size, 0).matrix();

  Eigen::ColPivHouseholderQR<CMat> qr(bem.basis);
  if (qr.rank() < bem.num_basis())
    throw SingularMatrixError("coefficient_prior: basis is rank deficient",
                              std::numeric_limits<double>::infinity());
  CMat y = qr.solve(r_unit);                    // B^dag R
  prior.basis_cross = qr.solve(y.adjoint()).adjoint();  // B^dag R B^dag^H

  const Eigen::Index taps = profile.num_taps();
  const Eigen::Index nb = bem.num_basis();
  prior.full = CMat::Zero(nb * taps, nb * taps);
  for (Eigen::Index q1 = 0; q1 < nb; ++q1)
    for (Eigen::Index q2 = 0; q2 < nb; ++q2)
      for (Eigen::Index l = 0; l < taps; ++l)
        prior.full(q1 * taps + l, q2 * taps + l) =
            prior.basis_cross(q1, q2) * profile.path_powers[l];
  return prior;
}

namespace {

// R_s = F^H Phi F for diagonal Phi: covariance of the time-domain signal.
CMat time_signal_covariance(const OtfsParams& params, const RVec& phi) {
  CMat f = dd_transform(params.delay_bins, params.doppler_bins);
  return f.adjoint() * phi.asDiagonal() * f;
}

// First Hadamard factor of the interference blocks:
// F_MN (F^H Phi_d F) F_MN^H.
CMat interference_first_factor(const OtfsParams& params, const RVec& gamma) {
  CMat f_mn = dft_matrix(params.frame_size());
  CMat r_sd = time_signal_covariance(params, gamma);
  return f_mn * r_sd * f_mn.adjoint();
}

}  // namespace

CMat interference_covariance(const OtfsParams& params, const BemConfig& bem,
                             const CoefficientPrior& prior,
                             const PowerMatrices& powers) {
  const Eigen::Index nm = params.frame_size();
  const Eigen::Index nb = bem.num_basis();
  const Eigen::Index taps = static_cast<Eigen::Index>(prior.path_powers.size());
  CMat first = interference_first_factor(params, powers.data_gamma);
  CMat f_l = dft_submatrix(nm, taps);

  std::vector<CMat> v(nb);
  for (Eigen::Index q = 0; q < nb; ++q)
    v[q] = basis_doppler_operator(params, bem, static_cast<int>(q));

  // Unitary F_{MN x L} carries 1/sqrt(MN) per factor, hence the NM scale.
  CMat out = CMat::Zero(nm, nm);
  for (Eigen::Index q1 = 0; q1 < nb; ++q1) {
    for (Eigen::Index q2 = 0; q2 < nb; ++q2) {
      CMat second = f_l * prior.block(q1, q2) * f_l.adjoint();
      CMat had = first.cwiseProduct(second);
      out += static_cast<double>(nm) * (v[q1] * had * v[q2].adjoint());
    }
  }
  return out;
}

CMat modeling_noise_covariance(const OtfsParams& params,
                               const PowerMatrices& powers,
                               const ModelingErrorReport& modeling) {
  const Eigen::Index nm = params.frame_size();
  CMat r_s = time_signal_covariance(params, powers.total());
  CMat acc = CMat::Zero(nm, nm);
  for (std::size_t l = 0; l < modeling.per_path_cov.size(); ++l) {
    acc += shifted(r_s, static_cast<Eigen::Index>(l),
                   static_cast<Eigen::Index>(l))
               .cwiseProduct(modeling.per_path_cov[l]);
  }
  CMat f = dd_transform(params.delay_bins, params.doppler_bins);
  return f * acc * f.adjoint();
}

CMat noise_covariance(const OtfsParams& params, const BemConfig& bem,
                      const ChannelProfile& profile,
                      const HardwareProfile& hw, const PilotOperator& op,
                      const CoefficientPrior& prior,
                      const PowerMatrices& powers,
                      const ModelingErrorReport& modeling) {
  const Eigen::Index nm = params.frame_size();
  const Eigen::Index n_obs = op.num_observations();
  const Eigen::Index nb = bem.num_basis();
  const Eigen::Index taps = profile.num_taps();

  // E F: observed rows of the DD transform.
  CMat f = dd_transform(params.delay_bins, params.doppler_bins);
  CMat ef = op.extract_rows(f);
  CMat f_mn = dft_matrix(nm);
  CMat f_l = dft_submatrix(nm, taps);

  // E V_q = (E F) diag(b_q) F_MN^H.
  std::vector<CMat> ev(nb);
  for (Eigen::Index q = 0; q < nb; ++q)
    ev[q] = ef * bem.basis.col(q).asDiagonal() * f_mn.adjoint();

  CMat first = interference_first_factor(params, powers.data_gamma);
  CMat interference = CMat::Zero(n_obs, n_obs);
  for (Eigen::Index q1 = 0; q1 < nb; ++q1) {
    for (Eigen::Index q2 = 0; q2 < nb; ++q2) {
      CMat second = f_l * prior.block(q1, q2) * f_l.adjoint();
      CMat had = first.cwiseProduct(second);
      interference += static_cast<double>(nm) * (ev[q1] * had * ev[q2].adjoint());
    }
  }

  CMat r_s = time_signal_covariance(params, powers.total());
  CMat mod_acc = CMat::Zero(nm, nm);
  for (Eigen::Index l = 0; l < taps; ++l)
    mod_acc += shifted(r_s, l, l).cwiseProduct(modeling.per_path_cov[l]);
  CMat modeling_obs = ef * mod_acc * ef.adjoint();

  DistortionVariances v = distortion_variances(hw, powers.mean_power(),
                                               profile.total_power());
  double white = hw.rx_quality * v.tx * profile.total_power() + hw.awgn_var +
                 v.rx;
  CMat r_z = hw.combined_gain() * (interference + modeling_obs);
  r_z += white * CMat::Identity(n_obs, n_obs);
  return 0.5 * (r_z + r_z.adjoint().eval());
}

WienerEstimator error_covariance(const PilotOperator& op,
                                 const CoefficientPrior& prior, const CMat& r_z,
                                 const HardwareProfile& hw) {
  const CMat& h_obs = op.observed_a_p;  // n_obs x n_c
  const Eigen::Index n_c = h_obs.cols();
  const double gain = hw.combined_gain();

  CMat innovation = gain * (h_obs * prior.full * h_obs.adjoint()) + r_z;
  innovation = 0.5 * (innovation + innovation.adjoint().eval());
  double ridge0 = 1e-12 * innovation.real().trace() / innovation.rows();
  // D = R_c (E A_p)^H S^{-1}; solve against S to avoid the explicit inverse.
  CMat d = hermitian_solve(innovation, h_obs * prior.full, ridge0).adjoint();

  WienerEstimator w;
  w.gain_d = d;
  w.shrink_k = CMat::Identity(n_c, n_c) - gain * d * h_obs;
  w.error_cov = w.shrink_k * prior.full * w.shrink_k.adjoint() +
                gain * d * r_z * d.adjoint();
  w.error_cov = 0.5 * (w.error_cov + w.error_cov.adjoint().eval());
  return w;
}

MseBreakdown theoretical_mse(const BemConfig& bem, const CMat& error_cov,
                             double modeling_total, Eigen::Index num_taps) {
  // trace(Omega R_ct Omega^H) = trace(R_ct (B^H B (x) I)); the permutation
  // between the two stackings drops out of the trace.
  CMat gram = bem.basis.adjoint() * bem.basis;
  CMat weight = kron(gram, CMat::Identity(num_taps, num_taps));
  double est = (error_cov * weight).real().trace();
  MseBreakdown mse;
  double denom = static_cast<double>(bem.frame_size) * num_taps;
  mse.estimation = est / denom;
  mse.modeling = modeling_total / denom;
  mse.total = mse.estimation + mse.modeling;
  return mse;
}

EstimatorContext build_estimator_context(const OtfsParams& params,
                                         const PilotConfig& pilot,
                                         const BemConfig& bem,
                                         const ChannelProfile& profile,
                                         const HardwareProfile& hw) {
  if (profile.max_delay() != pilot.guard_delay)
    throw ConfigError(
        "build_estimator_context: pilot guard half-width must equal the "
        "channel delay spread");
  if (params.cp_len < profile.max_delay())
    throw ConfigError("build_estimator_context: cyclic prefix shorter than "
                      "the channel delay spread");
  EstimatorContext ctx;
  ctx.params = params;
  ctx.pilot = pilot;
  ctx.bem = bem;
  ctx.profile = profile;
  ctx.hw = hw;
  ctx.op = build_pilot_operator(params, pilot, bem);
  ctx.powers = data_power_matrix(params, pilot, bem.order);
  ctx.prior = coefficient_prior(bem, profile);
  ctx.modeling = modeling_error(bem, profile);
  ctx.signal_power = ctx.powers.mean_power();
  ctx.r_z = noise_covariance(params, bem, profile, hw, ctx.op, ctx.prior,
                             ctx.powers, ctx.modeling);
  ctx.wiener = error_covariance(ctx.op, ctx.prior, ctx.r_z, hw);
  ctx.mse = theoretical_mse(bem, ctx.wiener.error_cov, ctx.modeling.total_mse,
                            profile.num_taps());
  return ctx;
}

BemCoefficients mmse_estimate(const CVec& y_dd, const EstimatorContext& ctx) {
  BemCoefficients c;
  c.num_basis = ctx.bem.num_basis();
  c.num_taps = ctx.profile.num_taps();
  c.stacked = ctx.hw.combined_amplitude() *
              (ctx.wiener.gain_d * ctx.op.extract(y_dd));
  return c;
}

}  // namespace ddlink
