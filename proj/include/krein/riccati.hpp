#pragma once

// Angle-operator solvers for the maximal nonnegative invariant subspace of a
// J-dissipative block operator. The subspace is the graph {(x, Kx)} of a
// contraction K: H+ -> H-; K solves the Riccati equation
//   A21 + A22 K - K A11 - K A12 K = 0                                (R2)
// and equivalently, at any admissible mu,
//   (1 - KG)(A22 - mu)(F + K) = K (S - mu)                           (Ric1)
//   F + K = (A22 - mu)^{-1} (1 - KG)^{-1} K (S - mu)                 (Ric2)
//
// Three solvers: spectral (ordered Schur), fixed point on Ric2, and
// continuation through the strictly dissipative family A - eps P+.

#include <Eigen/Dense>
#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "krein/core.hpp"
#include "krein/schur_order.hpp"
#include "krein/transfer.hpp"

namespace krein {

struct AngleOperator {
  Matrix K;           // n- x n+
  double norm = 0.0;  // ||K||_2, <= 1 + 1e-10 for valid outputs
};

struct GraphSubspace {
  Matrix basis;  // n x n+, orthonormal columns spanning {(x, Kx)}
};

struct SpectralDiagnostics {
  std::vector<Complex> selected;  // eigenvalues of the restriction, as chosen
  double spectral_gap = kInf;     // Re lambda_{n+ + 1} - Re lambda_{n+}
  double gram_min = kInf;         // lambda_min of basis^* J basis
  double cond_xplus = 1.0;
  int tie_break_combinations = 0;  // candidate selections enumerated (0 = clean split)
};

struct SpectralSolution {
  AngleOperator angle;
  GraphSubspace subspace;
  SpectralDiagnostics diagnostics;
};

struct SolveOptions {
  bool force = false;        // skip the dissipativity gate
  double gap_tol = 1e-9;     // relative Re-gap below which eigenvalues cluster
  double cond_limit = 1e10;  // condition limit for the X+ coordinate block
};

// [I; K] with orthonormalized columns.
inline Matrix graph_stack(const Matrix& k) {
  Matrix stack(k.cols() + k.rows(), k.cols());
  stack.topRows(k.cols()) = Matrix::Identity(k.cols(), k.cols());
  stack.bottomRows(k.rows()) = k;
  return stack;
}

namespace detail {

inline void require_dissipative(const BlockOperator& a, bool force) {
  if (force) return;
  DissipativityVerdict v = check_dissipativity(a);
  if (!v.j_dissipative)
    throw KreinError(ErrorCode::not_dissipative,
                     "lambda_max Herm(JA) = " + std::to_string(v.max_real_numeric) +
                         " exceeds tolerance " + std::to_string(v.tolerance));
}

inline double gram_min_of(const KreinStructure& s, const Matrix& basis) {
  if (basis.cols() == 0) return kInf;
  Matrix jb = basis;
  jb.bottomRows(s.n_minus) = -jb.bottomRows(s.n_minus);
  return lambda_min_hermitian(herm(basis.adjoint() * jb));
}

}  // namespace detail

// Spectral solver: order a complex Schur form of the assembled matrix so that
// the n+ eigenvalues with smallest real part lead, and read K off the stacked
// invariant-subspace basis. Near-axis real-part ties are broken by enumerating
// cluster subsets (ascending imaginary part first) and keeping the selection
// that maximizes the minimal eigenvalue of the Gram form basis^* J basis.
//
// Errors: not_dissipative; gap_too_small (inseparable or non-nonnegative
// cluster at the split -- use continuation); coordinate_degenerate (X+ beyond
// cond_limit); contraction_violated (||K|| > 1 + 1e-10, non-dissipative data).
inline SpectralSolution solve_angle_spectral(const BlockOperator& a,
                                             const SolveOptions& opts = {}) {
  detail::require_dissipative(a, opts.force);
  const int np = a.structure.n_plus, nm = a.structure.n_minus;
  const int n = np + nm;

  SpectralSolution sol;
  if (np == 0) {
    sol.angle.K = Matrix::Zero(nm, 0);
    sol.subspace.basis = Matrix::Zero(n, 0);
    return sol;
  }

  Matrix full = a.assemble();
  const double scale = std::max(1.0, detail::spectral_norm_estimate(full));

  Eigen::ComplexSchur<Matrix> schur(full);
  if (schur.info() != Eigen::Success)
    throw KreinError(ErrorCode::not_diagonalizable_or_ill_conditioned, "Schur iteration failed");

  // Rank the Schur diagonal by (Re, Im).
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  const Matrix& t0 = schur.matrixT();
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    Complex x = t0(i, i), y = t0(j, j);
    if (x.real() != y.real()) return x.real() < y.real();
    if (x.imag() != y.imag()) return x.imag() < y.imag();
    return i < j;
  });

  SpectralDiagnostics diag;
  if (nm > 0)
    diag.spectral_gap = t0(order[np], order[np]).real() - t0(order[np - 1], order[np - 1]).real();

  const double ctol = opts.gap_tol * scale;

  // Cluster of consecutive (in Re) eigenvalues straddling the split position.
  int lo = np, hi = np - 1;  // [lo, hi] empty <=> clean split
  if (nm > 0 && diag.spectral_gap <= ctol) {
    lo = np - 1;
    hi = np;
    auto re_at = [&](int r) { return t0(order[r], order[r]).real(); };
    while (lo > 0 && re_at(lo) - re_at(lo - 1) <= ctol) --lo;
    while (hi + 1 < n && re_at(hi + 1) - re_at(hi) <= ctol) ++hi;
  }

  Matrix best_t, best_u;
  double best_gram = -kInf;
  bool any_complete = false;

  auto try_mask = [&](const std::vector<bool>& mask) {
    Matrix t = schur.matrixT();
    Matrix u = schur.matrixU();
    if (!detail::reorder_to_top(t, u, mask)) return;
    any_complete = true;
    double g = detail::gram_min_of(a.structure, u.leftCols(np));
    if (g > best_gram) {
      best_gram = g;
      best_t = std::move(t);
      best_u = std::move(u);
    }
  };

  if (lo > hi) {
    std::vector<bool> mask(n, false);
    for (int r = 0; r < np; ++r) mask[order[r]] = true;
    try_mask(mask);
  } else {
    // Choose (np - lo) members out of the cluster positions [lo, hi]; fixed
    // members are everything strictly below the cluster.
    std::vector<int> cluster(order.begin() + lo, order.begin() + hi + 1);
    std::sort(cluster.begin(), cluster.end(), [&](int i, int j) {
      Complex x = t0(i, i), y = t0(j, j);
      if (x.imag() != y.imag()) return x.imag() < y.imag();
      if (x.real() != y.real()) return x.real() < y.real();
      return i < j;
    });
    const int need = np - lo;
    const int m = static_cast<int>(cluster.size());

    // Lexicographic combinations over the Im-sorted cluster, capped.
    std::vector<int> comb(need);
    std::iota(comb.begin(), comb.end(), 0);
    const int kMaxCombos = 64;
    for (int combos = 0; combos < kMaxCombos; ++combos) {
      std::vector<bool> mask(n, false);
      for (int r = 0; r < lo; ++r) mask[order[r]] = true;
      for (int c : comb) mask[cluster[c]] = true;
      try_mask(mask);
      ++diag.tie_break_combinations;

      // next combination
      int i = need - 1;
      while (i >= 0 && comb[i] == m - need + i) --i;
      if (i < 0) break;
      ++comb[i];
      for (int j = i + 1; j < need; ++j) comb[j] = comb[j - 1] + 1;
    }
  }

  if (!any_complete)
    throw KreinError(ErrorCode::gap_too_small,
                     "defective eigenvalue cluster at the splitting index could not be "
                     "separated; use the continuation solver");

  Matrix basis = best_u.leftCols(np);
  Matrix xp = basis.topRows(np);
  Matrix xm = basis.bottomRows(nm);

  RealVector sv = detail::singular_values(xp);
  double cond = sv(0) / std::max(sv(sv.size() - 1), 1e-300);
  diag.cond_xplus = cond;
  if (!(cond <= opts.cond_limit))
    throw KreinError(ErrorCode::coordinate_degenerate,
                     "cond(X+) = " + std::to_string(cond) +
                         "; graph coordinates ill-posed, use the continuation solver");

  diag.gram_min = best_gram;
  if (!(best_gram >= -1e-10))
    throw KreinError(ErrorCode::gap_too_small,
                     "no candidate selection with nonnegative Gram form (min eigenvalue " +
                         std::to_string(best_gram) + "); use the continuation solver");

  sol.angle.K = xm * Eigen::PartialPivLU<Matrix>(xp).inverse();
  sol.angle.norm = detail::spectral_norm(sol.angle.K);
  if (!(sol.angle.norm <= 1.0 + 1e-10))
    throw KreinError(ErrorCode::contraction_violated,
                     "||K|| = " + std::to_string(sol.angle.norm) +
                         " > 1 + 1e-10; input operator is not J-dissipative");

  sol.subspace.basis = basis;
  diag.selected.reserve(np);
  for (int i = 0; i < np; ++i) diag.selected.push_back(best_t(i, i));
  std::sort(diag.selected.begin(), diag.selected.end(), [](Complex x, Complex y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
  sol.diagnostics = std::move(diag);
  return sol;
}

// Smallest mu = -2^k (1 + ||A||), k = 0, 1, ..., with ||G(mu)|| < 1/4
// (headroom below the 1/2 contraction hypothesis).
inline Complex default_mu(const BlockOperator& a) {
  double s = 1.0 + a.norm_estimate();
  for (int k = 0; k <= 60; ++k) {
    Complex mu(-std::ldexp(s, k), 0.0);
    if (eval_transfer(a, mu).g_norm < 0.25) return mu;
  }
  throw KreinError(ErrorCode::g_norm_too_large, "no mu on the ray -2^k (1 + ||A||) achieves ||G|| < 1/4");
}

struct FixedPointOptions {
  bool force = false;
  int max_iter = 500;
  double rtol = 1e-12;       // step tolerance, relative to max(1, ||K||)
  double theta = 1.0;        // relaxation: K <- (1 - theta) K + theta map(K)
  double residual_tol = 1e-8;
};

struct FixedPointResult {
  AngleOperator angle;
  int iterations = 0;
  double step_norm = 0.0;
  double ric2_residual = 0.0;
  Complex mu;
  double g_norm = 0.0;
};

struct RiccatiResiduals {
  double classical = 0.0;
  double modified_ric1 = 0.0;
  double modified_ric2 = 0.0;
  double invariance_defect = 0.0;

  double max() const {
    return std::max(std::max(classical, modified_ric1),
                    std::max(modified_ric2, invariance_defect));
  }
};

// All four residuals at an admissible mu, relative to scale = max(1, ||A||):
//   classical            (R2)
//   modified_ric1/ric2   (Ric1)/(Ric2)
//   invariance_defect    ||(I - BB^*) A B|| for the orthonormal graph basis B.
// Errors: mu_in_spectrum; one_minus_kg_singular (sigma_min(1 - KG) <= 1e-12).
inline RiccatiResiduals riccati_residuals(const BlockOperator& a, const Matrix& k, Complex mu) {
  const int np = a.structure.n_plus, nm = a.structure.n_minus;
  if (k.rows() != nm || k.cols() != np)
    throw KreinError(ErrorCode::dimension_mismatch, "riccati_residuals: K must be n- x n+");
  TransferEval te = eval_transfer(a, mu);

  Matrix one_minus_kg = Matrix::Identity(nm, nm) - k * te.G;
  if (nm > 0 && detail::sigma_min(one_minus_kg) <= 1e-12)
    throw KreinError(ErrorCode::one_minus_kg_singular, "sigma_min(1 - KG) <= 1e-12");

  const double scale = std::max(1.0, detail::spectral_norm_estimate(a.assemble()));
  RiccatiResiduals r;

  Matrix classical = a.A21 + a.A22 * k - k * a.A11 - k * a.A12 * k;
  r.classical = detail::spectral_norm(classical) / scale;

  Matrix shifted = a.A22 - mu * Matrix::Identity(nm, nm);
  Matrix s_shift = te.S - mu * Matrix::Identity(np, np);
  Matrix f_plus_k = te.F + k;

  Matrix ric1 = one_minus_kg * shifted * f_plus_k - k * s_shift;
  r.modified_ric1 = detail::spectral_norm(ric1) / scale;

  if (nm > 0) {
    Eigen::PartialPivLU<Matrix> lu_kg(one_minus_kg);
    Eigen::PartialPivLU<Matrix> lu22(shifted);
    Matrix ric2 = f_plus_k - lu22.solve(lu_kg.solve(k * s_shift));
    r.modified_ric2 = detail::spectral_norm(ric2) / scale;
  }

  if (np > 0) {
    Matrix b = detail::orthonormalize(graph_stack(k));
    Matrix ab = a.assemble() * b;
    Matrix defect = ab - b * (b.adjoint() * ab);
    r.invariance_defect = detail::spectral_norm(defect) / scale;
  }
  return r;
}

// Fixed-point solver on (Ric2): K_{j+1} = -F + (A22 - mu)^{-1} (1 - K_j G)^{-1}
// K_j (S - mu), K_0 = 0. Requires ||G(mu)|| < 1/2 for an explicit mu; the
// automatic mu walks the ray until ||G|| < 1/4.
// Errors: not_dissipative; g_norm_too_large; one_minus_kg_singular;
// contraction_violated (||K_j|| > 1.1); no_convergence (best residual reported).
inline FixedPointResult solve_angle_fixed_point(const BlockOperator& a,
                                                std::optional<Complex> mu_opt = {},
                                                const FixedPointOptions& opts = {}) {
  detail::require_dissipative(a, opts.force);
  const int np = a.structure.n_plus, nm = a.structure.n_minus;

  FixedPointResult res;
  res.mu = mu_opt ? *mu_opt : default_mu(a);
  TransferEval te = eval_transfer(a, res.mu);
  res.g_norm = te.g_norm;
  if (mu_opt && !(te.g_norm < 0.5))
    throw KreinError(ErrorCode::g_norm_too_large,
                     "||G(mu)|| = " + std::to_string(te.g_norm) + " >= 1/2 at the given mu");

  Matrix k = Matrix::Zero(nm, np);
  if (np == 0 || nm == 0) {
    res.angle.K = k;
    res.iterations = 0;
    return res;
  }

  Matrix shifted = a.A22 - res.mu * Matrix::Identity(nm, nm);
  Eigen::PartialPivLU<Matrix> lu22(shifted);
  Matrix s_shift = te.S - res.mu * Matrix::Identity(np, np);

  for (int it = 1; it <= opts.max_iter; ++it) {
    Matrix one_minus_kg = Matrix::Identity(nm, nm) - k * te.G;
    if (detail::sigma_min(one_minus_kg) <= 1e-12)
      throw KreinError(ErrorCode::one_minus_kg_singular,
                       "sigma_min(1 - KG) <= 1e-12 during fixed-point iteration");
    Matrix mapped = -te.F + lu22.solve(Eigen::PartialPivLU<Matrix>(one_minus_kg).solve(k * s_shift));
    Matrix next = (1.0 - opts.theta) * k + opts.theta * mapped;
    double step = detail::spectral_norm(next - k);
    k = std::move(next);
    double k_norm = detail::spectral_norm(k);
    if (!(k_norm <= 1.1))
      throw KreinError(ErrorCode::contraction_violated,
                       "||K_j|| = " + std::to_string(k_norm) + " > 1.1 during iteration");
    if (step <= opts.rtol * std::max(1.0, k_norm)) {
      res.iterations = it;
      res.step_norm = step;
      res.angle.K = k;
      res.angle.norm = k_norm;
      res.ric2_residual = riccati_residuals(a, k, res.mu).modified_ric2;
      if (!(res.ric2_residual <= opts.residual_tol))
        throw KreinError(ErrorCode::no_convergence,
                         "converged step-wise but modified_ric2 residual = " +
                             std::to_string(res.ric2_residual) + " exceeds tolerance");
      return res;
    }
  }
  double best = riccati_residuals(a, k, res.mu).modified_ric2;
  throw KreinError(ErrorCode::no_convergence,
                   "max_iter = " + std::to_string(opts.max_iter) +
                       " reached; best modified_ric2 residual = " + std::to_string(best));
}

inline std::vector<double> default_continuation_schedule() {
  std::vector<double> s;
  for (int k = 1; k <= 8; ++k) s.push_back(std::pow(10.0, -k));
  return s;
}

struct ContinuationStep {
  double epsilon = 0.0;
  double k_norm = 0.0;
  double step = 0.0;  // ||K_eps - K_prev||; 0 for the first entry
};

struct ContinuationResult {
  AngleOperator angle;
  std::vector<ContinuationStep> trace;
  double ric1_residual = 0.0;  // against the ORIGINAL operator
};

// Continuation through A_eps = A - eps P+ (P+ the H+ coordinate projection):
// each A_eps pushes the selected spectrum strictly left, is solved spectrally,
// and the K_eps sequence must settle as eps decreases. The final K is
// validated on the unperturbed operator via the Ric1 residual.
// Errors: not_dissipative; invalid_params (bad schedule); no_stabilization;
// residual_too_large (final validation).
inline ContinuationResult solve_angle_continuation(
    const BlockOperator& a, const std::vector<double>& schedule = default_continuation_schedule(),
    const SolveOptions& opts = {}) {
  if (schedule.empty())
    throw KreinError(ErrorCode::invalid_params, "continuation schedule must be nonempty");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i] > 0.0) || (i > 0 && !(schedule[i] < schedule[i - 1])))
      throw KreinError(ErrorCode::invalid_params,
                       "continuation schedule must be positive and strictly decreasing");
  }
  detail::require_dissipative(a, opts.force);
  const int np = a.structure.n_plus;

  SolveOptions inner = opts;
  inner.force = true;  // A - eps P+ inherits dissipativity from A

  ContinuationResult res;
  Matrix prev;
  bool have_prev = false;

  for (double eps : schedule) {
    BlockOperator pert(a.structure, a.A11 - eps * Matrix::Identity(np, np), a.A12, a.A21, a.A22);
    SpectralSolution sol;
    try {
      sol = solve_angle_spectral(pert, inner);
    } catch (const KreinError&) {
      // Accept an early finish only if the sequence has already settled.
      if (res.trace.size() >= 2 && res.trace.back().step <= 1e-8) break;
      throw;
    }
    ContinuationStep st;
    st.epsilon = eps;
    st.k_norm = sol.angle.norm;
    st.step = have_prev ? detail::spectral_norm(sol.angle.K - prev) : 0.0;
    res.trace.push_back(st);
    prev = sol.angle.K;
    have_prev = true;
  }

  // Steps must be non-increasing (up to a noise floor) over the last 3 entries.
  const std::size_t m = res.trace.size();
  if (m >= 4) {
    for (std::size_t i = m - 3; i < m; ++i) {
      if (!(res.trace[i].step <= std::max(res.trace[i - 1].step, 1e-12)))
        throw KreinError(ErrorCode::no_stabilization,
                         "consecutive K-differences are not decreasing over the last 3 steps");
    }
  }

  res.angle.K = prev;
  res.angle.norm = detail::spectral_norm(prev);
  res.ric1_residual = riccati_residuals(a, res.angle.K, default_mu(a)).modified_ric1;
  if (!(res.ric1_residual <= 1e-6))
    throw KreinError(ErrorCode::residual_too_large,
                     "continuation limit fails Ric1 on the original operator: residual = " +
                         std::to_string(res.ric1_residual));
  return res;
}

// Max modified_ric1 residual of one K over a list of admissible mu: a solution
// at one admissible mu must solve Ric1 at every other (mu-independence).
inline double mu_independence(const BlockOperator& a, const Matrix& k,
                              const std::vector<Complex>& mus) {
  double worst = 0.0;
  for (Complex mu : mus) worst = std::max(worst, riccati_residuals(a, k, mu).modified_ric1);
  return worst;
}

struct RestrictionReport {
  Matrix X;                // restriction in graph coordinates, n+ x n+
  Matrix X_adjoint_graph;  // (1 + K^*K)^{-1} X^* (1 + K^*K)
  std::vector<Complex> spectrum;
  double spectral_abscissa = -kInf;
  double x_norm = 0.0;
  double agreement = 0.0;  // ||X - (A11 + A12 K)|| / max(1, ||A||)
};

// Restriction of A to the graph subspace in H+ coordinates:
//   X = S + G (1 - KG)^{-1} K (S - mu),
// cross-checked against A11 + A12 K (agreement is part of the report), with
// the graph-space adjoint through the metric 1 + K^*K. The coordinate map has
// ||Q^{-1}|| <= 2 (the sharp bound is sqrt(1 + ||K||^2) <= sqrt 2).
// Errors: one_minus_kg_singular; residual_too_large (K fails the 1e-6 gate).
inline RestrictionReport restriction(const BlockOperator& a, const Matrix& k, Complex mu) {
  const int np = a.structure.n_plus, nm = a.structure.n_minus;
  RiccatiResiduals rr = riccati_residuals(a, k, mu);  // also validates mu and 1 - KG
  if (!(rr.max() <= 1e-6))
    throw KreinError(ErrorCode::residual_too_large,
                     "K does not solve the Riccati equation: max residual = " +
                         std::to_string(rr.max()));
  TransferEval te = eval_transfer(a, mu);

  RestrictionReport rep;
  Matrix one_minus_kg = Matrix::Identity(nm, nm) - k * te.G;
  Matrix s_shift = te.S - mu * Matrix::Identity(np, np);
  rep.X = te.S + te.G * Eigen::PartialPivLU<Matrix>(one_minus_kg).solve(k * s_shift);

  Matrix direct = a.A11 + a.A12 * k;
  const double scale = std::max(1.0, detail::spectral_norm_estimate(a.assemble()));
  rep.agreement = detail::spectral_norm(rep.X - direct) / scale;

  Matrix metric = Matrix::Identity(np, np) + k.adjoint() * k;
  rep.X_adjoint_graph = metric.llt().solve(rep.X.adjoint() * metric);

  if (np > 0) {
    Eigen::ComplexEigenSolver<Matrix> es(rep.X, /*computeEigenvectors=*/false);
    rep.spectrum.assign(es.eigenvalues().data(), es.eigenvalues().data() + np);
    std::sort(rep.spectrum.begin(), rep.spectrum.end(), [](Complex x, Complex y) {
      if (x.real() != y.real()) return x.real() < y.real();
      return x.imag() < y.imag();
    });
  }
  for (Complex z : rep.spectrum) rep.spectral_abscissa = std::max(rep.spectral_abscissa, z.real());
  rep.x_norm = detail::spectral_norm(rep.X);
  return rep;
}

// sigma(A_+) must lie in the closed left half-plane.
inline bool spectral_location_check(const RestrictionReport& rep) {
  return rep.spectral_abscissa <= 1e-8 * std::max(1.0, rep.x_norm);
}

}  // namespace krein
