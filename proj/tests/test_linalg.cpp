#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ddlink/errors.hpp"
#include "ddlink/linalg.hpp"

using namespace ddlink;

namespace {

double max_abs(const CMat& a) { return a.cwiseAbs().maxCoeff(); }

CMat random_matrix(Eigen::Index rows, Eigen::Index cols, RngStream& rng) {
  CMat a(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = rng.complex_normal();
  return a;
}

CMat random_psd(Eigen::Index n, RngStream& rng, double shift = 0.1) {
  CMat x = random_matrix(n, n, rng);
  return (x * x.adjoint() + shift * CMat::Identity(n, n)).eval();
}

}  // namespace

TEST_CASE("dft_matrix trivial sizes") {
  CMat f1 = dft_matrix(1);
  CHECK(f1.rows() == 1);
  CHECK(std::abs(f1(0, 0) - cxd(1.0, 0.0)) < 1e-15);

  CMat f2 = dft_matrix(2);
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(f2(0, 0) - cxd(s, 0)) < 1e-15);
  CHECK(std::abs(f2(0, 1) - cxd(s, 0)) < 1e-15);
  CHECK(std::abs(f2(1, 0) - cxd(s, 0)) < 1e-15);
  CHECK(std::abs(f2(1, 1) - cxd(-s, 0)) < 1e-15);
}

TEST_CASE("dft_matrix unitary via multiply oracle") {
  for (Eigen::Index n : {3, 8, 64, 257}) {
    CMat f = dft_matrix(n);
    CMat eye = f * f.adjoint();
    CHECK(max_abs(eye - CMat::Identity(n, n)) < 1e-12);
  }
}

TEST_CASE("dft unitary on vectors at large size") {
  const Eigen::Index n = 4096;
  CMat f = dft_matrix(n);
  RngStream rng(11);
  CVec x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = rng.complex_normal();
  CVec round = f.adjoint() * (f * x);
  CHECK((round - x).cwiseAbs().maxCoeff() < 1e-12 * x.cwiseAbs().maxCoeff());
  CHECK(std::abs((f * x).norm() - x.norm()) < 1e-10);
}

TEST_CASE("dft_matrix rejects n = 0") {
  CHECK_THROWS_AS(dft_matrix(0), DimensionError);
}

TEST_CASE("dd_transform degenerate cases") {
  CMat f = dd_transform(5, 1);
  CHECK(max_abs(f - CMat::Identity(5, 5)) < 1e-15);

  CMat g = dd_transform(1, 6);
  CHECK(max_abs(g - dft_matrix(6)) < 1e-15);
}

TEST_CASE("dd_transform unitary and kron structure") {
  CMat f = dd_transform(4, 2);
  CHECK(f.rows() == 8);
  CHECK(max_abs(f * f.adjoint() - CMat::Identity(8, 8)) < 1e-12);
  CMat manual = kron(dft_matrix(2), CMat::Identity(4, 4));
  CHECK(max_abs(f - manual) == 0.0);

  // Block structure: F[k*M+m, n*M+m'] = F_N[k,n] delta_{m,m'}.
  CMat fn = dft_matrix(2);
  for (Eigen::Index k = 0; k < 2; ++k)
    for (Eigen::Index m = 0; m < 4; ++m)
      for (Eigen::Index n = 0; n < 2; ++n)
        for (Eigen::Index mp = 0; mp < 4; ++mp) {
          cxd expected = m == mp ? fn(k, n) : cxd(0.0);
          CHECK(std::abs(f(k * 4 + m, n * 4 + mp) - expected) < 1e-15);
        }
}

TEST_CASE("cyclic shift is a full-period permutation") {
  const Eigen::Index n = 6;
  CMat p = cyclic_shift(n);
  CMat acc = CMat::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) acc = p * acc;
  CHECK(max_abs(acc - CMat::Identity(n, n)) == 0.0);
  CVec s(n);
  for (Eigen::Index i = 0; i < n; ++i) s(i) = cxd(double(i), 0);
  CVec shifted = p * s;
  CHECK(std::abs(shifted(0) - s(n - 1)) == 0.0);
  CHECK(std::abs(shifted(3) - s(2)) == 0.0);
}

TEST_CASE("hermitian_solve identity cases") {
  CMat eye = CMat::Identity(4, 4);
  RngStream rng(3);
  CMat b = random_matrix(4, 2, rng);
  CHECK(max_abs(hermitian_solve(eye, b) - b) < 1e-14);

  CMat two = 2.0 * CMat::Identity(3, 3);
  CMat x = hermitian_solve(two, CMat::Identity(3, 3));
  CHECK(max_abs(x - 0.5 * CMat::Identity(3, 3)) < 1e-14);
}

TEST_CASE("hermitian_solve matches explicit inverse on random PSD") {
  RngStream rng(17);
  CMat a = random_psd(6, rng);
  CMat b = random_matrix(6, 3, rng);
  CMat x = hermitian_solve(a, b);
  CMat x_oracle = a.inverse() * b;
  CHECK(max_abs(x - x_oracle) < 1e-8 * max_abs(x_oracle));
  CHECK(max_abs(a * x - b) < 1e-8 * max_abs(b));
}

TEST_CASE("hermitian_solve recovers the solution of A X0") {
  RngStream rng(23);
  for (int rep = 0; rep < 5; ++rep) {
    CMat a = random_psd(8, rng, 0.05);
    CMat x0 = random_matrix(8, 2, rng);
    CMat x = hermitian_solve(a, a * x0);
    CHECK(max_abs(x - x0) < 1e-8 * std::max(1.0, max_abs(x0)));
  }
}

TEST_CASE("hermitian_solve ridge escalation rescues exact singularity") {
  CMat a = CMat::Zero(3, 3);
  a(0, 0) = 1.0;  // rank 1
  CVec b = CVec::Zero(3);
  b(0) = 2.0;
  // In range of A: the ridged solve still recovers the first component.
  CMat x = hermitian_solve(a, b);
  CHECK(std::abs(x(0, 0) - cxd(2.0, 0.0)) < 1e-5);
}

TEST_CASE("hermitian_solve reports singularity for indefinite input") {
  CMat a = CMat::Zero(3, 3);
  a(0, 0) = 1.0;
  a(1, 1) = -0.5;
  a(2, 2) = 1.0;
  CMat b = CMat::Identity(3, 3);
  try {
    hermitian_solve(a, b);
    FAIL("expected SingularMatrixError");
  } catch (const SingularMatrixError& e) {
    CHECK(e.condition_estimate() >= 1.0);
  }
}

TEST_CASE("HermitianPsd validates input") {
  RngStream rng(5);
  CMat a = random_matrix(4, 4, rng);
  CHECK_THROWS_AS(HermitianPsd{a}, ModelError);

  CMat neg = -CMat::Identity(3, 3);
  CHECK_THROWS_AS(HermitianPsd(neg).sqrt_factor(), ModelError);
}

TEST_CASE("sample_correlated zero covariance") {
  HermitianPsd cov(CMat::Zero(4, 4));
  RngStream rng(1);
  CVec v = sample_correlated(cov, rng);
  CHECK(v.size() == 4);
  CHECK(v.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sample_correlated determinism") {
  RngStream rng(99);
  HermitianPsd cov(random_psd(5, rng));
  RngStream a = RngStream::derive(42, 7, 3);
  RngStream b = RngStream::derive(42, 7, 3);
  CVec va = sample_correlated(cov, a);
  CVec vb = sample_correlated(cov, b);
  CHECK((va - vb).cwiseAbs().maxCoeff() == 0.0);
  RngStream c = RngStream::derive(42, 7, 4);
  CHECK((va - sample_correlated(cov, c)).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("sample_correlated matches target statistics") {
  const int draws = 100000;
  const double sigma2 = 0.8;

  SUBCASE("diagonal covariance") {
    HermitianPsd cov(sigma2 * CMat::Identity(2, 2));
    RngStream rng(2024);
    double p0 = 0.0, p1 = 0.0;
    for (int i = 0; i < draws; ++i) {
      CVec v = sample_correlated(cov, rng);
      p0 += std::norm(v(0));
      p1 += std::norm(v(1));
    }
    p0 /= draws;
    p1 /= draws;
    CHECK(p0 == doctest::Approx(sigma2).epsilon(0.05));
    CHECK(p1 == doctest::Approx(sigma2).epsilon(0.05));
  }

  SUBCASE("off-diagonal correlation 0.9") {
    CMat c(2, 2);
    c << sigma2, 0.9 * sigma2, 0.9 * sigma2, sigma2;
    HermitianPsd cov(c);
    RngStream rng(4048);
    cxd cross = 0.0;
    double p0 = 0.0, p1 = 0.0;
    for (int i = 0; i < draws; ++i) {
      CVec v = sample_correlated(cov, rng);
      cross += v(0) * std::conj(v(1));
      p0 += std::norm(v(0));
      p1 += std::norm(v(1));
    }
    double corr = (cross / double(draws)).real() / std::sqrt(p0 / draws * p1 / draws);
    CHECK(corr == doctest::Approx(0.9).epsilon(0.06));
  }
}

TEST_CASE("rng uniform and normal sanity") {
  RngStream rng(31);
  double mean = 0.0, var = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double x = rng.normal();
    mean += x;
    var += x * x;
  }
  mean /= n;
  var = var / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}
