#pragma once

// Dense complex linear algebra helpers on top of Eigen.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "sptent/error.hpp"

namespace sptent {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Rng = std::mt19937_64;

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline double unitarity_residual(const Matrix& u) {
  return max_abs(u.adjoint() * u - Matrix::Identity(u.cols(), u.cols()));
}

inline double isometry_residual(const Matrix& s) { return unitarity_residual(s); }

inline double hermiticity_residual(const Matrix& m) { return max_abs(m - m.adjoint()); }

inline Complex complex_normal(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  double re = n(rng);
  double im = n(rng);
  return {re, im};
}

inline Matrix ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = complex_normal(rng);
  return m;
}

/// Haar-distributed unitary via QR of a Ginibre matrix with the R-diagonal phases removed.
inline Matrix random_unitary(Eigen::Index n, Rng& rng) {
  if (n == 0) return Matrix(0, 0);
  Matrix z = ginibre(n, n, rng);
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    Complex d = r(j, j);
    double a = std::abs(d);
    q.col(j) *= (a > 0 ? d / a : Complex(1.0));
  }
  return q;
}

inline Matrix random_hermitian(Eigen::Index n, Rng& rng) {
  Matrix g = ginibre(n, n, rng);
  return (g + g.adjoint()) * 0.5;
}

inline Vector random_state(Eigen::Index n, Rng& rng) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = complex_normal(rng);
  return v / v.norm();
}

inline double trace_norm_hermitian(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

inline double min_eigenvalue_hermitian(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

/// Von Neumann entropy in bits; eigenvalues below 1e-15 contribute nothing.
inline double entropy_bits(const Matrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    double p = es.eigenvalues()(i);
    if (p > 1e-15) s -= p * std::log2(p);
  }
  return s;
}

/// Orthonormal basis (as columns) of the eigenspace of a Hermitian projector with eigenvalue ~1.
inline Matrix projector_range(const Matrix& p, double threshold = 0.5) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(p);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) > threshold) keep.push_back(i);
  Matrix out(p.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(keep[k]);
  return out;
}

/// Columns spanning the null space of `m`, from singular values below `tol * max(1, s_max)`.
inline Matrix null_space(const Matrix& m, double tol = 1e-9) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  double scale = std::max(1.0, s.size() ? s(0) : 0.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol * scale) ++rank;
  return svd.matrixV().rightCols(m.cols() - rank);
}

/// Partial transpose on the first tensor factor of a (dim_a*dim_b)-square matrix.
inline Matrix partial_transpose_first(const Matrix& rho, Eigen::Index dim_a, Eigen::Index dim_b) {
  require(rho.rows() == dim_a * dim_b && rho.cols() == dim_a * dim_b, ErrorCode::DimensionMismatch,
          "partial transpose dimensions do not match");
  Matrix out(rho.rows(), rho.cols());
  for (Eigen::Index a = 0; a < dim_a; ++a)
    for (Eigen::Index a2 = 0; a2 < dim_a; ++a2)
      out.block(a * dim_b, a2 * dim_b, dim_b, dim_b) = rho.block(a2 * dim_b, a * dim_b, dim_b, dim_b);
  return out;
}

/// Partial trace over the second factor.
inline Matrix trace_out_second(const Matrix& rho, Eigen::Index dim_a, Eigen::Index dim_b) {
  Matrix out = Matrix::Zero(dim_a, dim_a);
  for (Eigen::Index a = 0; a < dim_a; ++a)
    for (Eigen::Index a2 = 0; a2 < dim_a; ++a2) out(a, a2) = rho.block(a * dim_b, a2 * dim_b, dim_b, dim_b).trace();
  return out;
}

/// Swap the two tensor factors of a vector on C^{da} (x) C^{db}.
inline Vector swap_factors(const Vector& v, Eigen::Index da, Eigen::Index db) {
  Vector out(v.size());
  for (Eigen::Index a = 0; a < da; ++a)
    for (Eigen::Index b = 0; b < db; ++b) out(b * da + a) = v(a * db + b);
  return out;
}

}  // namespace sptent
