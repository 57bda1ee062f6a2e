#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>

#include "krein/error.hpp"

namespace krein {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

namespace detail {

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

// Hermitian part (M + M*)/2.
inline Matrix herm(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

inline double lambda_max_hermitian(const Matrix& h) {
  if (h.rows() == 0) return -kInf;
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

inline double lambda_min_hermitian(const Matrix& h) {
  if (h.rows() == 0) return kInf;
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// Exact singular values (descending). BDCSVD handles complex input and is fast
// enough at desk scale.
inline RealVector singular_values(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return RealVector::Zero(0);
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues();
}

inline double spectral_norm(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  return singular_values(m)(0);
}

inline double sigma_min(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  RealVector s = singular_values(m);
  return s(s.size() - 1);
}

// Power-iteration estimate of the spectral norm; deterministic start vector.
// Used where the norm only sets a scale or the value is far from a threshold;
// exact SVD is used for contract checks (||K||, sigma_min tests).
inline double spectral_norm_estimate(const Matrix& m, int max_iter = 120, double rtol = 1e-10) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  const Eigen::Index n = m.cols();
  Vector x(n);
  for (Eigen::Index j = 0; j < n; ++j)
    x(j) = Complex(1.0, 0.25) / static_cast<double>(j + 1);
  x.normalize();
  double est = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Vector y = m * x;
    Vector z = m.adjoint() * y;
    double zn = z.norm();
    if (zn == 0.0) return 0.0;
    double next = y.norm();  // = sqrt(x* M*M x) since ||x|| = 1
    x = z / zn;
    if (it > 2 && std::abs(next - est) <= rtol * std::max(next, 1e-300)) {
      est = next;
      break;
    }
    est = next;
  }
  return est;
}

inline double scale_of(const Matrix& m) { return std::max(1.0, spectral_norm_estimate(m)); }

// sin of the largest principal angle between the column spans of two
// orthonormal bases: ||(I - B1 B1*) B2||_2. Accurate for tiny angles, unlike
// acos of singular values of B1* B2.
inline double sin_max_principal_angle(const Matrix& b1, const Matrix& b2) {
  Matrix residual = b2 - b1 * (b1.adjoint() * b2);
  return spectral_norm(residual);
}

// Orthonormal basis of the column span (thin QR).
inline Matrix orthonormalize(const Matrix& m) {
  if (m.cols() == 0) return m;
  Eigen::HouseholderQR<Matrix> qr(m);
  Matrix q = qr.householderQ() * Matrix::Identity(m.rows(), m.cols());
  return q;
}

// Deterministic RNG: splitmix64 over the seed stream; distribution code is
// ours, not the (implementation-defined) std::uniform_real_distribution.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed + 0x9E3779B97F4A7C15ULL) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // uniform in [-1, 1]
  double uniform_sym() {
    return 2.0 * (static_cast<double>(next_u64() >> 11) * 0x1.0p-53) - 1.0;
  }

  Complex complex_sym() {
    double re = uniform_sym();
    double im = uniform_sym();
    return Complex(re, im);
  }

  Matrix complex_matrix(Eigen::Index rows, Eigen::Index cols) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = complex_sym();
    return m;
  }

  Matrix real_matrix(Eigen::Index rows, Eigen::Index cols) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = Complex(uniform_sym(), 0.0);
    return m;
  }

  Vector complex_vector(Eigen::Index n) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = complex_sym();
    return v;
  }

 private:
  std::uint64_t state_;
};

}  // namespace detail
}  // namespace krein
