#pragma once

// Core Krein-space types and checks.
//
// The ambient space is C^{n+} (+) C^{n-} with fundamental symmetry
// J = diag(I, -I) and indefinite form [x, y] = (J x, y). The Hilbert inner
// product (x, y) is conjugate-linear in the SECOND argument throughout, i.e.
// (x, y) = y^* x in matrix notation.

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "krein/detail/linalg.hpp"
#include "krein/error.hpp"

namespace krein {

struct KreinStructure {
  int n_plus = 0;
  int n_minus = 0;

  KreinStructure() = default;
  KreinStructure(int np, int nm) : n_plus(np), n_minus(nm) {
    if (np < 0 || nm < 0 || np + nm == 0)
      throw KreinError(ErrorCode::invalid_params,
                       "Krein structure needs n_plus, n_minus >= 0 and n_plus + n_minus > 0");
  }

  int dim() const { return n_plus + n_minus; }

  // J = diag(I_{n+}, -I_{n-}) as a dense matrix.
  Matrix j_matrix() const {
    Matrix j = Matrix::Zero(dim(), dim());
    for (int i = 0; i < n_plus; ++i) j(i, i) = 1.0;
    for (int i = n_plus; i < dim(); ++i) j(i, i) = -1.0;
    return j;
  }

  Vector apply_j(const Vector& x) const {
    Vector y = x;
    y.tail(n_minus) = -y.tail(n_minus);
    return y;
  }

  bool operator==(const KreinStructure& o) const {
    return n_plus == o.n_plus && n_minus == o.n_minus;
  }
};

// Indefinite inner product [x, y] = (J x, y) = y^* J x.
inline Complex j_inner(const KreinStructure& s, const Vector& x, const Vector& y) {
  if (x.size() != s.dim() || y.size() != s.dim())
    throw KreinError(ErrorCode::dimension_mismatch, "j_inner: vector size != n_plus + n_minus");
  return y.dot(s.apply_j(x));  // Eigen's dot conjugates its object, i.e. y^* (Jx)
}

// Block operator
//   A = [ A11 A12 ]   with A11: n+ x n+, A12: n+ x n-,
//       [ A21 A22 ]        A21: n- x n+, A22: n- x n-.
struct BlockOperator {
  KreinStructure structure;
  Matrix A11, A12, A21, A22;

  BlockOperator() = default;

  BlockOperator(KreinStructure s, Matrix a11, Matrix a12, Matrix a21, Matrix a22)
      : structure(s),
        A11(std::move(a11)),
        A12(std::move(a12)),
        A21(std::move(a21)),
        A22(std::move(a22)) {
    validate();
  }

  static BlockOperator from_full(KreinStructure s, const Matrix& full) {
    if (full.rows() != s.dim() || full.cols() != s.dim())
      throw KreinError(ErrorCode::dimension_mismatch, "from_full: matrix size != n_plus + n_minus");
    const int np = s.n_plus, nm = s.n_minus;
    return BlockOperator(s, full.topLeftCorner(np, np), full.topRightCorner(np, nm),
                         full.bottomLeftCorner(nm, np), full.bottomRightCorner(nm, nm));
  }

  void validate() const {
    const int np = structure.n_plus, nm = structure.n_minus;
    if (A11.rows() != np || A11.cols() != np || A12.rows() != np || A12.cols() != nm ||
        A21.rows() != nm || A21.cols() != np || A22.rows() != nm || A22.cols() != nm)
      throw KreinError(ErrorCode::dimension_mismatch, "block shapes inconsistent with structure");
    if (!(detail::all_finite(A11) && detail::all_finite(A12) && detail::all_finite(A21) &&
          detail::all_finite(A22)))
      throw KreinError(ErrorCode::nonfinite_entry, "block operator has non-finite entries");
  }

  Matrix assemble() const {
    const int np = structure.n_plus, nm = structure.n_minus;
    Matrix full(np + nm, np + nm);
    full.topLeftCorner(np, np) = A11;
    full.topRightCorner(np, nm) = A12;
    full.bottomLeftCorner(nm, np) = A21;
    full.bottomRightCorner(nm, nm) = A22;
    return full;
  }

  // JA as a block operator: [[A11, A12], [-A21, -A22]].
  Matrix assemble_ja() const {
    Matrix full = assemble();
    full.bottomRows(structure.n_minus) = -full.bottomRows(structure.n_minus);
    return full;
  }

  double norm_estimate() const { return detail::spectral_norm_estimate(assemble()); }
};

// J-adjoint A^[*] = J A^* J, blockwise [[A11^*, -A21^*], [-A12^*, A22^*]].
// An involution: j_adjoint(j_adjoint(A)) == A bit-exactly.
inline BlockOperator j_adjoint(const BlockOperator& a) {
  return BlockOperator(a.structure, a.A11.adjoint(), -a.A21.adjoint(), -a.A12.adjoint(),
                       a.A22.adjoint());
}

struct DissipativityVerdict {
  bool j_dissipative = false;
  // max(0, -lambda_max) of the Hermitian part of JA: the uniform dissipativity
  // margin epsilon with Re[Ax,x] <= -eps (x,x).
  double uniform_margin = 0.0;
  // lambda_max of Herm(JA) as computed (signed).
  double max_real_numeric = 0.0;
  double tolerance = 0.0;
};

// A is J-dissipative iff JA is dissipative in the Hilbert sense:
// Re[Ax,x] = Re (JAx, x) = x^* Herm(JA) x <= 0 for all x.
inline DissipativityVerdict check_dissipativity(const BlockOperator& a,
                                                double tol_factor = 1e-10) {
  DissipativityVerdict v;
  Matrix ja = a.assemble_ja();
  double lmax = detail::lambda_max_hermitian(detail::herm(ja));
  double scale = std::max(1.0, detail::spectral_norm_estimate(a.assemble()));
  v.tolerance = tol_factor * scale;
  v.max_real_numeric = lmax;
  v.j_dissipative = lmax <= v.tolerance;
  v.uniform_margin = std::max(0.0, -lmax);
  return v;
}

namespace detail {

// Shared by factorization_residual / eval_transfer: (A22 - mu) must be
// comfortably invertible.
inline void require_mu_admissible(const Matrix& a22, Complex mu) {
  const Eigen::Index nm = a22.rows();
  if (nm == 0) return;
  Matrix shifted = a22 - mu * Matrix::Identity(nm, nm);
  double smin = sigma_min(shifted);
  double bound = 1e-12 * std::max(1.0, spectral_norm(a22));
  if (!(smin > bound))
    throw KreinError(ErrorCode::mu_in_spectrum,
                     "sigma_min(A22 - mu) = " + std::to_string(smin) +
                         " below admissibility bound " + std::to_string(bound));
}

}  // namespace detail

// Residual of the two congruence factorizations through the transfer function,
//   A      = mu + L_G diag(S - mu, A22 - mu) L_F
//   JA + mu = J L_G diag(S + mu, A22 - mu) L_F
// with L_G = [[1, G], [0, 1]], L_F = [[1, 0], [F, 1]]. Returns the larger of
// the two relative residuals, scale max(1, ||A||).
inline double factorization_residual(const BlockOperator& a, Complex mu) {
  const int np = a.structure.n_plus, nm = a.structure.n_minus;
  detail::require_mu_admissible(a.A22, mu);

  Matrix shifted = a.A22 - mu * Matrix::Identity(nm, nm);
  Matrix inv = Eigen::PartialPivLU<Matrix>(shifted).inverse();
  Matrix f = inv * a.A21;        // F = (A22 - mu)^{-1} A21
  Matrix g = a.A12 * inv;        // G = A12 (A22 - mu)^{-1}
  Matrix s = a.A11 - a.A12 * f;  // S = A11 - A12 F

  const int n = np + nm;
  Matrix lg = Matrix::Identity(n, n);
  lg.topRightCorner(np, nm) = g;
  Matrix lf = Matrix::Identity(n, n);
  lf.bottomLeftCorner(nm, np) = f;

  Matrix mid_a = Matrix::Zero(n, n);
  mid_a.topLeftCorner(np, np) = s - mu * Matrix::Identity(np, np);
  mid_a.bottomRightCorner(nm, nm) = shifted;

  Matrix mid_ja = Matrix::Zero(n, n);
  mid_ja.topLeftCorner(np, np) = s + mu * Matrix::Identity(np, np);
  mid_ja.bottomRightCorner(nm, nm) = shifted;

  Matrix full = a.assemble();
  Matrix rhs_a = mu * Matrix::Identity(n, n) + lg * mid_a * lf;

  Matrix j = a.structure.j_matrix();
  Matrix rhs_ja = j * (lg * mid_ja * lf);
  Matrix lhs_ja = a.assemble_ja() + mu * Matrix::Identity(n, n);

  double scale = std::max(1.0, detail::spectral_norm_estimate(full));
  double res_a = detail::spectral_norm_estimate(full - rhs_a) / scale;
  double res_ja = detail::spectral_norm_estimate(lhs_ja - rhs_ja) / scale;
  return std::max(res_a, res_ja);
}

// Residual of the quadratic form identity on the graph-type vector
// v = (x_plus, -F x_plus):
//   (S x+, x+) = (JA v, v) + mu (F x+, F x+).
// Relative to max(1, ||x+||^2).
inline double quadratic_identity_residual(const BlockOperator& a, Complex mu, const Vector& x_plus) {
  const int np = a.structure.n_plus, nm = a.structure.n_minus;
  if (x_plus.size() != np)
    throw KreinError(ErrorCode::dimension_mismatch, "quadratic_identity_residual: x_plus size");
  detail::require_mu_admissible(a.A22, mu);

  Matrix shifted = a.A22 - mu * Matrix::Identity(nm, nm);
  Eigen::PartialPivLU<Matrix> lu(shifted);
  Vector fx = lu.solve(a.A21 * x_plus);  // F x+ needs only one rhs

  Vector sx = a.A11 * x_plus - a.A12 * fx;

  Vector v(np + nm);
  v.head(np) = x_plus;
  v.tail(nm) = -fx;

  Matrix ja = a.assemble_ja();
  Complex lhs = x_plus.dot(sx);          // (S x+, x+) = x+^* S x+
  Complex mid = v.dot(ja * v);           // (JA v, v)
  Complex last = mu * fx.squaredNorm();  // mu (F x+, F x+)

  double scale = std::max(1.0, x_plus.squaredNorm());
  return std::abs(lhs - mid - last) / scale;
}

}  // namespace krein
