#pragma once

// Transfer-function calculus for block operators at points mu in the
// resolvent set of A22:
//   F(mu) = (A22 - mu)^{-1} A21        (n- x n+)
//   G(mu) = A12 (A22 - mu)^{-1}        (n+ x n-)
//   R(mu) = A12 (A22 - mu)^{-1} A21    (n+ x n+)
//   S(mu) = A11 - R(mu)                (n+ x n+)

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "krein/core.hpp"

namespace krein {

struct TransferEval {
  Complex mu;
  Matrix S, F, G, R;
  double s_norm = 0.0, f_norm = 0.0, g_norm = 0.0, r_norm = 0.0;
};

// Errors: mu_in_spectrum when sigma_min(A22 - mu) <= 1e-12 max(1, ||A22||).
inline TransferEval eval_transfer(const BlockOperator& a, Complex mu) {
  const int nm = a.structure.n_minus;
  detail::require_mu_admissible(a.A22, mu);

  TransferEval te;
  te.mu = mu;
  Matrix shifted = a.A22 - mu * Matrix::Identity(nm, nm);
  Matrix inv = Eigen::PartialPivLU<Matrix>(shifted).inverse();
  te.F = inv * a.A21;
  te.G = a.A12 * inv;
  te.R = a.A12 * te.F;
  te.S = a.A11 - te.R;
  te.s_norm = detail::spectral_norm(te.S);
  te.f_norm = detail::spectral_norm(te.F);
  te.g_norm = detail::spectral_norm(te.G);
  te.r_norm = detail::spectral_norm(te.R);
  return te;
}

// Principal-branch fractional power M^alpha through the eigendecomposition.
// Requires diagonalizable M with spectrum strictly in Re > 0 (away from the
// branch cut) and eigenvector condition <= cond_limit.
inline Matrix fractional_power(const Matrix& m, double alpha, double cond_limit = 1e8) {
  if (m.rows() != m.cols())
    throw KreinError(ErrorCode::dimension_mismatch, "fractional_power: square matrix required");
  Eigen::ComplexEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success)
    throw KreinError(ErrorCode::not_diagonalizable_or_ill_conditioned,
                     "eigendecomposition failed");
  const Vector& eigs = es.eigenvalues();
  double scale = std::max(1.0, detail::spectral_norm(m));
  for (Eigen::Index i = 0; i < eigs.size(); ++i) {
    if (!(eigs(i).real() > 1e-12 * scale))
      throw KreinError(ErrorCode::spectrum_touches_branch_cut,
                       "eigenvalue with Re <= 0 encountered; principal power undefined");
  }
  const Matrix& v = es.eigenvectors();
  RealVector sv = detail::singular_values(v);
  double cond = sv(0) / std::max(sv(sv.size() - 1), 1e-300);
  if (!(cond <= cond_limit))
    throw KreinError(ErrorCode::not_diagonalizable_or_ill_conditioned,
                     "eigenvector condition " + std::to_string(cond) + " exceeds limit");
  Vector powered(eigs.size());
  for (Eigen::Index i = 0; i < eigs.size(); ++i) powered(i) = std::pow(eigs(i), alpha);
  return v * powered.asDiagonal() * v.inverse();
}

struct PairNorms {
  double left = 0.0;   // || A12 N^alpha ||
  double right = 0.0;  // || N^{1-alpha} A21 ||
  double alpha = 0.0;
  int sign = 0;  // N = sign * (A22 + 1); +1 for dissipative-side A22, -1 otherwise
};

// Coupling-domination pair at exponent alpha in [0, 1]:
//   ( ||A12 N^alpha||, ||N^{1-alpha} A21|| ),  N = s (A22 + 1),
// with the sign s chosen so that sigma(N) lies in Re > 0 (the stable
// orientation; for normal A22 both orientations give the same norms).
// Errors: spectrum_touches_branch_cut if neither orientation works,
// not_diagonalizable_or_ill_conditioned from fractional_power.
inline PairNorms pair_norms(const BlockOperator& a, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw KreinError(ErrorCode::invalid_params, "pair_norms: alpha must lie in [0, 1]");
  const int nm = a.structure.n_minus;
  Matrix base = a.A22 + Matrix::Identity(nm, nm);
  Eigen::ComplexEigenSolver<Matrix> es(base);
  double min_re = kInf, max_re = -kInf;
  for (Eigen::Index i = 0; i < nm; ++i) {
    min_re = std::min(min_re, es.eigenvalues()(i).real());
    max_re = std::max(max_re, es.eigenvalues()(i).real());
  }
  int sign;
  if (min_re > 0)
    sign = +1;  // N = A22 + 1
  else if (max_re < 0)
    sign = -1;  // N = -A22 - 1
  else
    throw KreinError(ErrorCode::spectrum_touches_branch_cut,
                     "sigma(A22 + 1) straddles the imaginary axis");
  Matrix n_mat = double(sign) * base;

  PairNorms pn;
  pn.alpha = alpha;
  pn.sign = sign;
  pn.left = detail::spectral_norm(a.A12 * fractional_power(n_mat, alpha));
  pn.right = detail::spectral_norm(fractional_power(n_mat, 1.0 - alpha) * a.A21);
  return pn;
}

struct EnvelopeSample {
  Complex mu;
  bool admissible = false;
  double g_norm = 0.0, f_norm = 0.0, r_norm = 0.0, s_norm = 0.0;
};

struct EnvelopeCurve {
  std::vector<EnvelopeSample> samples;
};

// Default sampling set: logarithmic ray mu = -2^k (1 + ||A||), k = 0..12,
// plus the 45-degree offsets mu (1 -+ i) to probe the sector.
inline std::vector<Complex> default_mu_samples(const BlockOperator& a, int k_max = 12) {
  double s = 1.0 + detail::spectral_norm_estimate(a.assemble());
  std::vector<Complex> mus;
  for (int k = 0; k <= k_max; ++k) {
    double t = std::ldexp(s, k);  // s * 2^k
    mus.emplace_back(-t, 0.0);
    mus.emplace_back(-t, t);
    mus.emplace_back(-t, -t);
  }
  return mus;
}

// Norm envelope of the transfer functions over a mu sample set. Inadmissible
// samples (mu too close to sigma(A22)) are reported per-sample, not fatal.
inline EnvelopeCurve envelope(const BlockOperator& a, const std::vector<Complex>& mus) {
  EnvelopeCurve curve;
  curve.samples.reserve(mus.size());
  for (Complex mu : mus) {
    EnvelopeSample smp;
    smp.mu = mu;
    try {
      TransferEval te = eval_transfer(a, mu);
      smp.admissible = true;
      smp.g_norm = te.g_norm;
      smp.f_norm = te.f_norm;
      smp.r_norm = te.r_norm;
      smp.s_norm = te.s_norm;
    } catch (const KreinError& e) {
      if (e.code() != ErrorCode::mu_in_spectrum) throw;
      smp.admissible = false;
    }
    curve.samples.push_back(smp);
  }
  return curve;
}

inline EnvelopeCurve envelope(const BlockOperator& a) {
  return envelope(a, default_mu_samples(a));
}

}  // namespace krein
