#include "ddlink/linalg.hpp"

#include <cmath>
#include <numbers>

#include "ddlink/errors.hpp"

namespace ddlink {

CMat dft_matrix(Eigen::Index n, bool unitary) {
  if (n < 1) throw DimensionError("dft_matrix: n must be >= 1");
  CMat f(n, n);
  const double base = -2.0 * std::numbers::pi / static_cast<double>(n);
  const double scale = unitary ? 1.0 / std::sqrt(static_cast<double>(n)) : 1.0;
  for (Eigen::Index m = 0; m < n; ++m) {
    for (Eigen::Index k = 0; k < n; ++k) {
      // Reduce m*k mod n first so large grids keep full phase accuracy.
      double mk = static_cast<double>((m * k) % n);
      f(m, k) = std::polar(scale, base * mk);
    }
  }
  return f;
}

CMat dft_submatrix(Eigen::Index n, Eigen::Index cols) {
  if (n < 1 || cols < 1 || cols > n)
    throw DimensionError("dft_submatrix: need 1 <= cols <= n");
  CMat f(n, cols);
  const double base = -2.0 * std::numbers::pi / static_cast<double>(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (Eigen::Index m = 0; m < n; ++m)
    for (Eigen::Index k = 0; k < cols; ++k)
      f(m, k) = std::polar(scale, base * static_cast<double>((m * k) % n));
  return f;
}

CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CMat dd_transform(Eigen::Index delay_bins, Eigen::Index doppler_bins) {
  if (delay_bins < 1 || doppler_bins < 1)
    throw DimensionError("dd_transform: grid dimensions must be >= 1");
  return kron(dft_matrix(doppler_bins),
              CMat::Identity(delay_bins, delay_bins));
}

CMat cyclic_shift(Eigen::Index n) {
  if (n < 1) throw DimensionError("cyclic_shift: n must be >= 1");
  CMat p = CMat::Zero(n, n);
  for (Eigen::Index t = 0; t < n; ++t) p(t, (t - 1 + n) % n) = 1.0;
  return p;
}

HermitianPsd::HermitianPsd(CMat a) {
  if (a.rows() != a.cols())
    throw DimensionError("HermitianPsd: matrix must be square");
  double scale = a.cwiseAbs().maxCoeff();
  double asym = (a - a.adjoint()).cwiseAbs().maxCoeff();
  if (scale > 0.0 && asym > 1e-12 * scale)
    throw ModelError("HermitianPsd: matrix is not Hermitian within tolerance");
  a_ = 0.5 * (a + a.adjoint().eval());
}

const CMat& HermitianPsd::sqrt_factor() const {
  if (factored_) return factor_;
  Eigen::SelfAdjointEigenSolver<CMat> eig(a_);
  if (eig.info() != Eigen::Success)
    throw ModelError("HermitianPsd: eigendecomposition failed");
  RVec vals = eig.eigenvalues();
  double top = vals.maxCoeff();
  if (top < 0.0) top = 0.0;
  if (vals.minCoeff() < -1e-10 * std::max(top, 1e-300))
    throw ModelError("HermitianPsd: matrix is not PSD within tolerance");
  // Keep only eigenpairs that carry weight; clip small negatives to zero.
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    if (vals(i) > 1e-14 * top) ++rank;
  factor_.resize(a_.rows(), rank);
  Eigen::Index col = 0;
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    if (vals(i) > 1e-14 * top)
      factor_.col(col++) = eig.eigenvectors().col(i) * std::sqrt(vals(i));
  }
  factored_ = true;
  return factor_;
}

namespace {

double condition_estimate(const CMat& a) {
  Eigen::SelfAdjointEigenSolver<CMat> eig(a);
  if (eig.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  double lo = std::abs(eig.eigenvalues().minCoeff());
  double hi = std::abs(eig.eigenvalues().maxCoeff());
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

}  // namespace

CMat hermitian_solve(const CMat& a, const CMat& b, double ridge) {
  if (a.rows() != a.cols()) throw DimensionError("hermitian_solve: A not square");
  if (a.rows() != b.rows())
    throw DimensionError("hermitian_solve: dimension mismatch");
  const Eigen::Index n = a.rows();
  const double tr = a.real().trace();
  const double ridge_cap = 1e-6 * std::abs(tr) / static_cast<double>(n);
  double r = ridge;
  for (;;) {
    CMat shifted = a;
    if (r > 0.0) shifted += r * CMat::Identity(n, n);
    Eigen::LLT<CMat> llt(shifted);
    if (llt.info() == Eigen::Success) return llt.solve(b);
    double next = (r == 0.0) ? std::max(1e-14 * std::abs(tr) / n, 1e-300)
                             : 10.0 * r;
    if (next > ridge_cap || ridge_cap == 0.0) {
      throw SingularMatrixError(
          "hermitian_solve: factorization failed after ridge escalation",
          condition_estimate(a));
    }
    r = next;
  }
}

CMat hermitian_solve(const HermitianPsd& a, const CMat& b, double ridge) {
  return hermitian_solve(a.matrix(), b, ridge);
}

CVec sample_correlated(const HermitianPsd& cov, RngStream& rng) {
  const CMat& s = cov.sqrt_factor();
  CVec z(s.cols());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.complex_normal();
  if (s.cols() == 0) return CVec::Zero(cov.dim());
  return s * z;
}

}  // namespace ddlink
