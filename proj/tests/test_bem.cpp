#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ddlink/bem.hpp"
#include "ddlink/errors.hpp"

using namespace ddlink;

namespace {

double max_abs(const CMat& a) { return a.cwiseAbs().maxCoeff(); }

OtfsParams make_params(Eigen::Index m, Eigen::Index n) {
  OtfsParams p;
  p.delay_bins = m;
  p.doppler_bins = n;
  return p;
}

ChannelRealization random_channel(Eigen::Index taps, Eigen::Index nm,
                                  RngStream& rng) {
  ChannelRealization h;
  h.gains = CMat(taps, nm);
  for (Eigen::Index l = 0; l < taps; ++l)
    for (Eigen::Index t = 0; t < nm; ++t) h.gains(l, t) = rng.complex_normal();
  return h;
}

// Operator-form reconstruction:
// sqrt(MN) sum_q diag(b_q) F_MN^H diag(F_{MN x L} c_q) F_MN.
CMat reconstruct_operator_form(const BemCoefficients& c, const BemConfig& bem) {
  const Eigen::Index nm = bem.frame_size;
  CMat f_mn = dft_matrix(nm);
  CMat f_l = dft_submatrix(nm, c.num_taps);
  CMat out = CMat::Zero(nm, nm);
  for (Eigen::Index q = 0; q < c.num_basis; ++q) {
    CVec cq(c.num_taps);
    for (Eigen::Index l = 0; l < c.num_taps; ++l) cq(l) = c.at(q, l);
    CVec eig = f_l * cq;
    out += std::sqrt(double(nm)) * (bem.basis.col(q).asDiagonal() *
                                    (f_mn.adjoint() * eig.asDiagonal() * f_mn));
  }
  return out;
}

}  // namespace

TEST_CASE("derive_orders reference values") {
  OtfsParams p = make_params(64, 16);
  double t_s = p.sample_interval();
  ChannelProfile profile = ChannelProfile::uniform(6, 1851.85, t_s);
  auto [q_s, q_l] = derive_orders(p, profile, 2);
  CHECK(q_s == 2);
  CHECK(q_l == 4);

  ChannelProfile still = ChannelProfile::uniform(6, 0.0, t_s);
  auto [q_s0, q_l0] = derive_orders(p, still, 2);
  CHECK(q_s0 == 0);
  CHECK(q_l0 == 0);
}

TEST_CASE("basis construction") {
  SUBCASE("zero order is the all-ones column") {
    BemConfig bem = BemConfig::build_with_order(12, 0, 2);
    CHECK(bem.basis.cols() == 1);
    CHECK(max_abs(bem.basis - CMat::Ones(12, 1)) < 1e-15);
    CHECK(bem.freqs(0) == 0.0);
  }
  SUBCASE("DC column sits at ceil(Q/2)") {
    BemConfig bem = BemConfig::build_with_order(24, 4, 2);
    CHECK(bem.freqs(2) == 0.0);
    CHECK(max_abs(bem.basis.col(2) - CVec::Ones(24)) < 1e-15);
    CHECK(bem.basis.col(0).squaredNorm() == doctest::Approx(24.0));
  }
  SUBCASE("critically sampled basis is orthogonal: B^H B = NM I") {
    BemConfig bem = BemConfig::build_with_order(24, 4, 1);
    CMat gram = bem.basis.adjoint() * bem.basis;
    CHECK(max_abs(gram - 24.0 * CMat::Identity(5, 5)) < 1e-10);
    // Geometric-series oracle for one off-diagonal entry.
    double w = bem.freqs(1) - bem.freqs(0);
    cxd acc = 0.0;
    for (int t = 0; t < 24; ++t) acc += std::polar(1.0, w * t);
    CHECK(std::abs(gram(1, 0) - acc) < 1e-10);
  }
  SUBCASE("oversampled basis keeps full rank with finite conditioning") {
    BemConfig bem = BemConfig::build_with_order(64 * 16, 4, 2);
    Eigen::JacobiSVD<CMat> svd(bem.basis);
    double cond = svd.singularValues()(0) / svd.singularValues()(4);
    CHECK(cond < 1e4);
    CHECK(svd.singularValues()(4) > 0.0);
  }
  SUBCASE("order exceeding the frame is rejected") {
    CHECK_THROWS_AS(BemConfig::build_with_order(4, 4, 1), ConfigError);
  }
}

TEST_CASE("fit_coefficients") {
  SUBCASE("constant channel concentrates in the DC coefficient") {
    BemConfig bem = BemConfig::build_with_order(16, 2, 2);
    ChannelRealization h;
    h.gains = CMat::Constant(2, 16, cxd(0.3, -0.6));
    BemCoefficients c = fit_coefficients(h, bem);
    for (Eigen::Index l = 0; l < 2; ++l) {
      CHECK(std::abs(c.at(1, l) - cxd(0.3, -0.6)) < 1e-10);
      CHECK(std::abs(c.at(0, l)) < 1e-10);
      CHECK(std::abs(c.at(2, l)) < 1e-10);
    }
  }
  SUBCASE("in-span channel fits with negligible residual") {
    BemConfig bem = BemConfig::build_with_order(16, 2, 2);
    RngStream rng(2);
    BemCoefficients truth = BemCoefficients::zero(bem, 2);
    for (Eigen::Index i = 0; i < truth.stacked.size(); ++i)
      truth.stacked(i) = rng.complex_normal();
    ChannelRealization h = bem_tap_gains(truth, bem);
    BemCoefficients c = fit_coefficients(h, bem);
    CHECK((c.stacked - truth.stacked).cwiseAbs().maxCoeff() < 1e-10);
    ChannelRealization back = bem_tap_gains(c, bem);
    CHECK((back.gains - h.gains).cwiseAbs().maxCoeff() <
          1e-10 * h.gains.cwiseAbs().maxCoeff());
  }
  SUBCASE("matches the normal-equations oracle") {
    BemConfig bem = BemConfig::build_with_order(8, 2, 2);  // M=4, N=2
    RngStream rng(5);
    ChannelRealization h = random_channel(2, 8, rng);
    BemCoefficients c = fit_coefficients(h, bem);
    CMat gram = bem.basis.adjoint() * bem.basis;
    for (Eigen::Index l = 0; l < 2; ++l) {
      CVec rhs = bem.basis.adjoint() * h.gains.row(l).transpose();
      CVec oracle = gram.inverse() * rhs;
      for (Eigen::Index q = 0; q < 3; ++q)
        CHECK(std::abs(c.at(q, l) - oracle(q)) < 1e-10);
    }
  }
}

TEST_CASE("fit residual is orthogonal to every basis vector") {
  BemConfig bem = BemConfig::build_with_order(32, 2, 2);
  RngStream rng(11);
  ChannelRealization h = random_channel(3, 32, rng);
  BemCoefficients c = fit_coefficients(h, bem);
  ChannelRealization fitted = bem_tap_gains(c, bem);
  CMat residual = h.gains - fitted.gains;
  for (Eigen::Index l = 0; l < 3; ++l)
    for (Eigen::Index q = 0; q < 3; ++q) {
      cxd inner = (bem.basis.col(q).adjoint() * residual.row(l).transpose())(0);
      CHECK(std::abs(inner) < 1e-9);
    }
}

TEST_CASE("reconstruct_channel") {
  SUBCASE("zero coefficients give the zero matrix") {
    BemConfig bem = BemConfig::build_with_order(8, 2, 2);
    BemCoefficients c = BemCoefficients::zero(bem, 2);
    CHECK(max_abs(reconstruct_channel(c, bem)) == 0.0);
  }
  SUBCASE("exact-fit coefficients reproduce the dense channel") {
    BemConfig bem = BemConfig::build_with_order(8, 2, 2);
    RngStream rng(8);
    BemCoefficients truth = BemCoefficients::zero(bem, 2);
    for (Eigen::Index i = 0; i < truth.stacked.size(); ++i)
      truth.stacked(i) = rng.complex_normal();
    ChannelRealization h = bem_tap_gains(truth, bem);
    CMat rebuilt = reconstruct_channel(fit_coefficients(h, bem), bem);
    CHECK(max_abs(rebuilt - channel_matrix(h)) < 1e-10);
  }
  SUBCASE("tap-placement and operator forms agree") {
    BemConfig bem = BemConfig::build_with_order(8, 2, 2);
    RngStream rng(21);
    BemCoefficients c = BemCoefficients::zero(bem, 2);
    for (Eigen::Index i = 0; i < c.stacked.size(); ++i)
      c.stacked(i) = rng.complex_normal();
    CMat direct = reconstruct_channel(c, bem);
    CMat fourier = reconstruct_operator_form(c, bem);
    CHECK(max_abs(direct - fourier) < 1e-12);
  }
}

TEST_CASE("projection complement") {
  SUBCASE("full basis annihilates everything") {
    BemConfig bem = BemConfig::build_with_order(6, 5, 1);
    CHECK(max_abs(projection_complement(bem)) < 1e-10);
  }
  SUBCASE("idempotent, Hermitian, correct rank") {
    BemConfig bem = BemConfig::build_with_order(24, 4, 2);
    CMat g = projection_complement(bem);
    CHECK(max_abs(g * g - g) < 1e-10);
    CHECK(max_abs(g - g.adjoint()) < 1e-12);
    CHECK(max_abs(g * bem.basis) < 1e-10);
    CHECK(g.real().trace() == doctest::Approx(24.0 - 5.0).epsilon(1e-10));
  }
}

TEST_CASE("modeling error") {
  OtfsParams p = make_params(8, 4);
  double t_s = p.sample_interval();

  SUBCASE("zero Doppler has no modeling error") {
    ChannelProfile still = ChannelProfile::uniform(2, 0.0, t_s);
    BemConfig bem = BemConfig::build_with_order(32, 2, 2);
    CHECK(modeling_error(bem, still).total_mse < 1e-10);
  }

  SUBCASE("oversampling reduces the error at reference parameters") {
    OtfsParams big = make_params(64, 16);
    ChannelProfile profile =
        ChannelProfile::uniform(6, 1851.85, big.sample_interval());
    BemConfig ce = BemConfig::build(big, profile.max_doppler_hz, 1);
    BemConfig gce = BemConfig::build(big, profile.max_doppler_hz, 2);
    double mse_ce = modeling_error_total(ce, profile);
    double mse_gce = modeling_error_total(gce, profile);
    CHECK(mse_gce <= mse_ce);
    CHECK(mse_gce > 0.0);
  }

  SUBCASE("monotone non-increasing in the order") {
    ChannelProfile profile = ChannelProfile::uniform(2, 5000.0, t_s);
    double prev = std::numeric_limits<double>::infinity();
    for (int order : {0, 2, 4}) {
      BemConfig bem = BemConfig::build_with_order(32, order, 2);
      double mse = modeling_error_total(bem, profile);
      CHECK(mse <= prev + 1e-12);
      prev = mse;
    }
  }

  SUBCASE("Monte Carlo projection oracle") {
    ChannelProfile profile = ChannelProfile::uniform(2, 6000.0, t_s);
    BemConfig bem = BemConfig::build_with_order(32, 2, 2);
    ModelingErrorReport report = modeling_error(bem, profile);
    CMat g = projection_complement(bem);
    ChannelSampler sampler(profile, 32);
    RngStream rng(33);
    const int reps = 10000;
    double acc = 0.0;
    for (int i = 0; i < reps; ++i) {
      ChannelRealization h = sampler.sample(rng);
      for (Eigen::Index l = 0; l < 2; ++l)
        acc += (g * h.gains.row(l).transpose()).squaredNorm();
    }
    CHECK(acc / reps == doctest::Approx(report.total_mse).epsilon(0.05));
    // Per-path covariance traces sum to the total.
    double t0 = report.per_path_cov[0].real().trace();
    double t1 = report.per_path_cov[1].real().trace();
    CHECK(t0 + t1 == doctest::Approx(report.total_mse).epsilon(1e-10));
  }
}

TEST_CASE("channel splits into modeled part plus residual") {
  OtfsParams p = make_params(8, 4);
  ChannelProfile profile =
      ChannelProfile::uniform(3, 6000.0, p.sample_interval());
  BemConfig bem = BemConfig::build_with_order(32, 2, 2);
  ChannelSampler sampler(profile, 32);
  RngStream rng(19);
  ChannelRealization h = sampler.sample(rng);
  BemCoefficients c = fit_coefficients(h, bem);
  ChannelRealization residual;
  residual.gains = h.gains - bem_tap_gains(c, bem).gains;
  CMat recombined = reconstruct_channel(c, bem) + channel_matrix(residual);
  CHECK(max_abs(recombined - channel_matrix(h)) < 1e-12);
  CHECK(max_abs(channel_matrix(residual)) > 0.0);
}

TEST_CASE("stacking conventions: permutation and Kronecker maps") {
  BemConfig bem = BemConfig::build_with_order(6, 2, 2);
  const Eigen::Index taps = 2;
  CMat p = bem_permutation(bem, taps);
  CHECK(max_abs(p.adjoint() * p - CMat::Identity(6, 6)) == 0.0);

  CMat omega = kron(CMat::Identity(taps, taps), bem.basis) * p;
  CMat direct = coeff_to_cir_map(bem, taps);  // B (x) I
  CMat s_h = cir_path_major_map(bem, taps);
  CHECK(max_abs(omega - s_h * direct) < 1e-14);

  // Both maps send coefficients to the same tap trajectories.
  RngStream rng(4);
  BemCoefficients c = BemCoefficients::zero(bem, taps);
  for (Eigen::Index i = 0; i < c.stacked.size(); ++i)
    c.stacked(i) = rng.complex_normal();
  CVec h_time_major = direct * c.stacked;
  ChannelRealization h = bem_tap_gains(c, bem);
  CHECK((h_time_major - stack_time_major(h)).cwiseAbs().maxCoeff() < 1e-12);
}
