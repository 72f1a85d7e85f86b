#include "ddlink/link.hpp"

#include <cmath>

#include "ddlink/errors.hpp"

namespace ddlink {

LinkContext::LinkContext(const LinkSpec& s)
    : spec(s),
      bem(BemConfig::build(s.params, s.profile.max_doppler_hz, s.resolution)),
      sampler(s.profile, s.params.frame_size()) {
  spec.params.validate();
  spec.pilot.validate(spec.params);
  spec.profile.validate();
  if (spec.profile.num_taps() > spec.params.delay_bins)
    throw ConfigError("LinkContext: delay spread exceeds the delay axis");
  if (spec.params.cp_len < spec.profile.max_delay())
    throw ConfigError("LinkContext: cyclic prefix shorter than the channel");

  powers = data_power_matrix(spec.params, spec.pilot, bem.order);
  signal_power = powers.mean_power();
  f_dd = dd_transform(spec.params.delay_bins, spec.params.doppler_bins);
  s_p = strip_cp(modulate(pilot_frame(spec.params, spec.pilot), spec.params),
                 spec.params.cp_len);
  data_cells = data_cell_indices(spec.params, spec.pilot);

  if (spec.csi == CsiMode::Estimated) {
    estimator = build_estimator_context(spec.params, spec.pilot, bem,
                                        spec.profile, spec.hw);
    r_n = detector_noise_covariance(spec.params, bem, spec.profile, spec.hw,
                                    powers, estimator->wiener.error_cov,
                                    &estimator->modeling);
  } else {
    r_n = detector_noise_covariance(spec.params, bem, spec.profile, spec.hw,
                                    powers, CMat(), nullptr);
  }
}

const EstimatorContext& LinkContext::est() const {
  if (!estimator) throw ModelError("LinkContext: estimator not built");
  return *estimator;
}

namespace {

// out[t] = sum_l gains(l, t) s[(t - l) mod NM]
CVec circular_apply(const CMat& gains, const CVec& s) {
  const Eigen::Index nm = s.size();
  CVec out = CVec::Zero(nm);
  for (Eigen::Index t = 0; t < nm; ++t) {
    cxd acc = 0.0;
    for (Eigen::Index l = 0; l < gains.rows(); ++l)
      acc += gains(l, t) * s((t - l + nm) % nm);
    out(t) = acc;
  }
  return out;
}

// A = H F^H built row-wise from the tap trajectories.
CMat channel_times_fh(const CMat& gains, const CMat& f_dd) {
  const Eigen::Index nm = f_dd.rows();
  CMat a = CMat::Zero(nm, nm);
  for (Eigen::Index t = 0; t < nm; ++t)
    for (Eigen::Index l = 0; l < gains.rows(); ++l)
      a.row(t) += gains(l, t) * f_dd.col((t - l + nm) % nm).adjoint();
  return a;
}

}  // namespace

FastDetection detect_fast(const LinkContext& ctx, const CVec& r_o,
                          const ChannelRealization& h_hat,
                          const ChannelRealization& h_true, bool want_theory) {
  const Eigen::Index nm = ctx.spec.params.frame_size();
  const double gain = ctx.spec.hw.combined_gain();
  const double amp = ctx.spec.hw.combined_amplitude();

  CVec r_hat = r_o - amp * circular_apply(h_hat.gains, ctx.s_p);

  CMat a = channel_times_fh(h_hat.gains, ctx.f_dd);  // H_hat F^H
  CMat scaled = a * ctx.powers.data_gamma.cwiseSqrt().asDiagonal();
  CMat innovation = ctx.r_n;
  innovation.selfadjointView<Eigen::Lower>().rankUpdate(scaled, gain);
  Eigen::LLT<CMat> llt(innovation);
  if (llt.info() != Eigen::Success) {
    innovation += (1e-12 * innovation.real().trace() / nm) *
                  CMat::Identity(nm, nm);
    llt.compute(innovation);
    if (llt.info() != Eigen::Success)
      throw SingularMatrixError("detect_fast: innovation not factorizable",
                                std::numeric_limits<double>::infinity());
  }

  FastDetection det;
  // x_hat = F s_hat = sqrt(xi) F R_sd H_hat^H S^{-1} r_hat
  //       = sqrt(xi) Phi_d (H_hat F^H)^H S^{-1} r_hat.
  CVec u = llt.solve(r_hat);
  det.data_dd = amp * (ctx.powers.data_gamma.asDiagonal() * (a.adjoint() * u));

  if (want_theory) {
    CMat a_true = channel_times_fh(h_true.gains, ctx.f_dd);
    CMat w = llt.solve(a_true);
    det.t_diag.resize(nm);
    for (Eigen::Index i = 0; i < nm; ++i)
      det.t_diag(i) =
          gain * ctx.powers.data_gamma(i) * (a.col(i).dot(w.col(i))).real();
  }
  return det;
}

TrialOutcome run_trial(const LinkContext& ctx, RngStream& rng,
                       const TrialRequest& request) {
  const OtfsParams& params = ctx.spec.params;
  const ModulationSpec& mod = params.modulation;

  std::vector<std::uint8_t> bits(frame_bit_count(params, ctx.spec.pilot));
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng.bit());
  DdFrame frame = build_frame(params, ctx.spec.pilot, bits);
  CVec s_cp = modulate(frame, params);

  ChannelRealization h = ctx.sampler.sample(rng);
  CVec s_i = impair_transmit(s_cp, ctx.spec.hw, ctx.signal_power, rng);
  CVec r_o = receive_chain(s_i, h, ctx.spec.hw, ctx.signal_power,
                           params.cp_len, rng);

  TrialOutcome out;

  // With perfect channel knowledge there is nothing to estimate.
  ChannelRealization h_hat;
  if (ctx.spec.csi == CsiMode::Estimated) {
    CVec y = demodulate(r_o, params);
    BemCoefficients c_hat = mmse_estimate(y, ctx.est());
    h_hat = bem_tap_gains(c_hat, ctx.bem);
  }

  if (request.want_mse) {
    out.channel_sq_err = ctx.spec.csi == CsiMode::Estimated
                             ? (h.gains - h_hat.gains).squaredNorm()
                             : 0.0;
    out.has_mse = true;
  }

  if (request.want_ber) {
    const ChannelRealization& h_det =
        ctx.spec.csi == CsiMode::Perfect ? h : h_hat;
    FastDetection det = detect_fast(ctx, r_o, h_det, h, true);

    const double data_amp = std::sqrt(ctx.spec.pilot.data_power);
    std::vector<cxd> rx_symbols(ctx.data_cells.size());
    for (std::size_t i = 0; i < ctx.data_cells.size(); ++i)
      rx_symbols[i] = det.data_dd(ctx.data_cells[i]) / data_amp;
    std::vector<std::uint8_t> rx_bits = qam_demap(rx_symbols, mod);
    ErrorCount errors = count_errors(bits, rx_bits);
    out.bit_errors = errors.bit_errors;
    out.bits = errors.bits_total;

    BerTheory theory = theoretical_ber(det.t_diag, ctx.data_cells, mod);
    out.ber_theory_avg = theory.average;
    out.ber_theory_bound = theory.lower_bound;
    out.has_ber = true;
  }
  return out;
}

}  // namespace ddlink
