#pragma once

#include <Eigen/Dense>
#include <complex>

#include "ddlink/rng.hpp"

namespace ddlink {

using cxd = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

// Unitary n-point DFT matrix: entry [m,k] = exp(-j 2 pi m k / n) / sqrt(n).
// With unitary=false the 1/sqrt(n) factor is dropped.
CMat dft_matrix(Eigen::Index n, bool unitary = true);

// First `cols` columns of the unitary n-point DFT matrix.
CMat dft_submatrix(Eigen::Index n, Eigen::Index cols);

// Delay-Doppler transform F = F_N (x) I_M acting on time vectors indexed
// t = n*M + m (delay fastest). Unitary.
CMat dd_transform(Eigen::Index delay_bins, Eigen::Index doppler_bins);

// Kronecker product a (x) b.
CMat kron(const CMat& a, const CMat& b);

// Cyclic down-shift: (P s)[t] = s[(t-1) mod n].
CMat cyclic_shift(Eigen::Index n);

// Hermitian positive semidefinite matrix with a cached square-root factor.
// The input must be Hermitian to 1e-12 relative; it is symmetrized on
// construction. Eigenvalues may dip to -1e-10 * lambda_max before the factor
// clips them to zero; anything lower raises ModelError.
class HermitianPsd {
 public:
  explicit HermitianPsd(CMat a);

  Eigen::Index dim() const { return a_.rows(); }
  const CMat& matrix() const { return a_; }
  double trace_real() const { return a_.real().trace(); }

  // Truncated factor S (dim x r) with S S^H ~ A; rank r drops eigenvalues
  // below 1e-14 * lambda_max.
  const CMat& sqrt_factor() const;

 private:
  CMat a_;
  mutable CMat factor_;
  mutable bool factored_ = false;
};

// Solves (A + ridge I) X = B for Hermitian PSD A via Cholesky. The ridge
// escalates by 10x up to 1e-6 * trace(A)/dim when the factorization fails;
// past that a SingularMatrixError carrying a condition estimate is thrown.
CMat hermitian_solve(const CMat& a, const CMat& b, double ridge = 0.0);
CMat hermitian_solve(const HermitianPsd& a, const CMat& b, double ridge = 0.0);

// Zero-mean circularly-symmetric complex Gaussian draw with the given
// covariance.
CVec sample_correlated(const HermitianPsd& cov, RngStream& rng);

}  // namespace ddlink
