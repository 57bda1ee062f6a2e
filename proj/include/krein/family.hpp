#pragma once

// Structured problem generators and Galerkin-truncation diagnostics: nested
// finite sections emulating the unbounded-operator hypotheses (growing
// diagonal A22, bounded F0, compactly-decaying G0), plus trend reports for
// the truncation scheme K_m -> K.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "krein/core.hpp"
#include "krein/riccati.hpp"
#include "krein/semigroup.hpp"
#include "krein/transfer.hpp"

namespace krein {

enum class GeneratorKind { random_strict, neutral, structured_family };

inline const char* to_string(GeneratorKind k) {
  switch (k) {
    case GeneratorKind::random_strict: return "random_strict";
    case GeneratorKind::neutral: return "neutral";
    case GeneratorKind::structured_family: return "structured_family";
  }
  return "random_strict";
}

inline GeneratorKind generator_kind_from(const std::string& name) {
  if (name == "random_strict") return GeneratorKind::random_strict;
  if (name == "neutral") return GeneratorKind::neutral;
  if (name == "structured_family") return GeneratorKind::structured_family;
  throw KreinError(ErrorCode::invalid_params, "unknown generator kind: " + name);
}

struct GeneratorParams {
  // random_strict / neutral
  int n_plus = 2, n_minus = 2;
  double epsilon = 1.0;  // guaranteed dissipativity margin
  std::uint64_t seed = 1;
  // structured_family
  std::vector<int> sizes = {8, 16, 32};  // n_plus schedule; n_minus = sizes.back()
  double q = 1.0;                        // A22 = diag(k^q) growth exponent
  double f_decay = 2.5;                  // F0 entry decay (bounded coupling)
  double g_decay = 2.0;                  // G0 singular-value decay (compactness)
  double coupling = 1.0;                 // overall coupling amplitude
  Complex mu0 = Complex(-2.0, 0.0);      // transfer round-trip point
  double margin = 0.5;                   // target uniform margin; 0 embeds an
                                         // uncoupled i*omega mode (type-0 case)
  double omega = 1.0;                    // frequency of the margin-0 mode
  bool sectorial = false;                // complex sectorial S0 diagonal
  double r_growth = 0.0;                 // per-member A21 scaling exponent
                                         // (nonzero breaks nesting, by design)
};

struct OperatorFamily {
  std::string description;
  std::vector<BlockOperator> members;  // strictly increasing n_plus
  bool nested = false;
  bool promises_dissipativity = false;
  std::optional<Complex> mu0;
  Matrix F0, G0, S0;  // construction data (structured kind only)

  // Entrywise check that every member's plus-blocks are leading principal
  // sub-blocks of the last member's (A22 shared).
  bool verify_nesting() const {
    if (members.empty()) return false;
    const BlockOperator& big = members.back();
    for (const BlockOperator& m : members) {
      Eigen::Index p = m.structure.n_plus;
      if (m.structure.n_minus != big.structure.n_minus) return false;
      if ((m.A11 - big.A11.topLeftCorner(p, p)).norm() > 0.0) return false;
      if ((m.A12 - big.A12.topRows(p)).norm() > 0.0) return false;
      if ((m.A21 - big.A21.leftCols(p)).norm() > 0.0) return false;
      if ((m.A22 - big.A22).norm() > 0.0) return false;
    }
    return true;
  }
};

// Leading-principal-section truncation: A11 -> m x m corner, A12 -> first m
// rows, A21 -> first m columns, A22 untouched (coordinate projection in the
// plus space only).
inline BlockOperator truncate(const BlockOperator& a, int m) {
  if (m < 1 || m > a.structure.n_plus)
    throw KreinError(ErrorCode::dimension_mismatch,
                     "truncate: m must satisfy 1 <= m <= n_plus");
  KreinStructure s{m, a.structure.n_minus};
  return BlockOperator(s, a.A11.topLeftCorner(m, m), a.A12.topRows(m), a.A21.leftCols(m), a.A22);
}

namespace detail {

// A = J W with Herm(W) <= -eps: margin exactly eps by construction.
inline BlockOperator make_random_strict(int np, int nm, double eps, Rng& rng) {
  int n = np + nm;
  Matrix m = rng.complex_matrix(n, n);
  Matrix w = m - (lambda_max_hermitian(herm(m)) + eps) * Matrix::Identity(n, n);
  KreinStructure s{np, nm};
  Matrix full(n, n);
  full.topRows(np) = w.topRows(np);
  full.bottomRows(nm) = -w.bottomRows(nm);  // J W
  return BlockOperator::from_full(s, full);
}

}  // namespace detail

// Deterministic-per-seed test problems. random_strict and neutral return a
// single member; structured_family returns the whole nested list.
inline OperatorFamily generate(GeneratorKind kind, const GeneratorParams& p) {
  OperatorFamily fam;
  fam.description = to_string(kind);

  if (kind == GeneratorKind::random_strict || kind == GeneratorKind::neutral) {
    if (p.n_plus < 1 || p.n_minus < 1)
      throw KreinError(ErrorCode::invalid_params, "generate: n_plus, n_minus >= 1 required");
    if (!(p.epsilon > 0.0))
      throw KreinError(ErrorCode::invalid_params, "generate: epsilon > 0 required");
    detail::Rng rng(p.seed);
    BlockOperator strict = detail::make_random_strict(p.n_plus, p.n_minus, p.epsilon, rng);

    if (kind == GeneratorKind::random_strict) {
      fam.promises_dissipativity = true;
      fam.members.push_back(std::move(strict));
      return fam;
    }

    // neutral: prepend an uncoupled [[0,1],[1,0]] pair (plus index 0, minus
    // index 0) in front of the strict instance.
    int np = p.n_plus + 1, nm = p.n_minus + 1;
    Matrix a11 = Matrix::Zero(np, np), a12 = Matrix::Zero(np, nm);
    Matrix a21 = Matrix::Zero(nm, np), a22 = Matrix::Zero(nm, nm);
    a11.bottomRightCorner(p.n_plus, p.n_plus) = strict.A11;
    a22.bottomRightCorner(p.n_minus, p.n_minus) = strict.A22;
    a12.bottomRightCorner(p.n_plus, p.n_minus) = strict.A12;
    a21.bottomRightCorner(p.n_minus, p.n_plus) = strict.A21;
    a12(0, 0) = Complex(1.0, 0.0);
    a21(0, 0) = Complex(1.0, 0.0);
    fam.promises_dissipativity = true;  // margin 0: still dissipative
    fam.members.emplace_back(KreinStructure{np, nm}, a11, a12, a21, a22);
    return fam;
  }

  // structured_family
  if (p.sizes.empty())
    throw KreinError(ErrorCode::invalid_params, "generate: sizes must be nonempty");
  for (std::size_t i = 0; i < p.sizes.size(); ++i) {
    if (p.sizes[i] < 1 || (i > 0 && p.sizes[i] <= p.sizes[i - 1]))
      throw KreinError(ErrorCode::invalid_params, "generate: sizes must be strictly increasing");
  }
  if (!(p.q > 0.0) || !(p.f_decay > 0.0) || !(p.g_decay > 0.0))
    throw KreinError(ErrorCode::invalid_params, "generate: q, f_decay, g_decay must be > 0");
  if (!(p.margin >= 0.0) || p.margin > 0.9)
    throw KreinError(ErrorCode::invalid_params,
                     "generate: margin in [0, 0.9] required (A22 floor is 1)");
  if (p.mu0.real() >= 0.0)
    throw KreinError(ErrorCode::invalid_params, "generate: Re mu0 < 0 required");

  const int nf = p.sizes.back();
  const int nm = nf;
  const bool margin_zero = p.margin == 0.0;

  Matrix a22 = Matrix::Zero(nm, nm);
  for (int k = 0; k < nm; ++k) a22(k, k) = std::pow(double(k + 1), p.q);

  Matrix f0 = Matrix::Zero(nm, nf);  // bounded, mildly nonnormal
  for (int j = 0; j < std::min(nm, nf); ++j) {
    double amp = p.coupling * std::pow(double(j + 1), -p.f_decay);
    f0(j, j) = amp;
    if (j + 1 < nf) f0(j, j + 1) = 0.3 * amp;
  }
  Matrix g0 = Matrix::Zero(nf, nm);  // exact singular values: coupling k^{-g_decay}
  for (int j = 0; j < std::min(nm, nf); ++j)
    g0(j, j) = p.coupling * std::pow(double(j + 1), -p.g_decay);

  Matrix s0 = Matrix::Zero(nf, nf);
  for (int j = 0; j < nf; ++j) {
    double d = std::pow(double(j + 1), p.q);
    s0(j, j) = p.sectorial ? Complex(-d, -0.5 * d * (j % 2 ? -1.0 : 1.0)) : Complex(-d, 0.0);
  }

  if (margin_zero) {  // decouple plus index 0 for the embedded i*omega mode
    f0.col(0).setZero();
    g0.row(0).setZero();
  }

  Matrix shift = a22 - p.mu0 * Matrix::Identity(nm, nm);
  Matrix a21 = shift * f0;
  Matrix a12 = g0 * shift;
  Matrix a11 = s0 + a12 * f0;

  // Calibrate the uniform margin by shifting A11; Cauchy interlacing makes
  // every truncation inherit at least the full member's margin.
  KreinStructure sf{nf, nm};
  double target = margin_zero ? 0.05 : p.margin;
  double shifted_total = 0.0;
  for (int iter = 0; iter < 60; ++iter) {
    BlockOperator probe(sf, a11, a12, a21, a22);
    double m = check_dissipativity(probe).uniform_margin;
    if (m >= target) break;
    double delta = 2.0 * (target - m) + 1e-3;
    a11 -= delta * Matrix::Identity(nf, nf);
    shifted_total += delta;
    if (iter == 59)
      throw KreinError(ErrorCode::invalid_params,
                       "generate: margin target unreachable for these parameters");
  }
  s0.diagonal().array() -= shifted_total;  // keep S(mu0) = S0 exact

  if (margin_zero) {
    a11.row(0).setZero();
    a11.col(0).setZero();
    a11(0, 0) = Complex(0.0, p.omega);
    s0.row(0).setZero();
    s0.col(0).setZero();
    s0(0, 0) = Complex(0.0, p.omega);
  }

  BlockOperator full(sf, a11, a12, a21, a22);
  for (int m : p.sizes) {
    BlockOperator member = truncate(full, m);
    if (p.r_growth != 0.0) {
      double factor = std::pow(double(m) / double(p.sizes.front()), p.r_growth);
      member = BlockOperator(member.structure, member.A11, member.A12, factor * member.A21,
                             member.A22);
    }
    fam.members.push_back(std::move(member));
  }
  fam.nested = p.r_growth == 0.0;
  fam.promises_dissipativity = p.r_growth == 0.0;
  fam.mu0 = p.mu0;
  fam.F0 = f0;
  fam.G0 = g0;
  fam.S0 = s0;
  if (fam.promises_dissipativity)
    for (const BlockOperator& m : fam.members)
      if (!check_dissipativity(m).j_dissipative)
        throw KreinError(ErrorCode::not_dissipative, "generate: calibrated member not dissipative");
  return fam;
}

inline BlockOperator generate_one(GeneratorKind kind, const GeneratorParams& p) {
  OperatorFamily fam = generate(kind, p);
  return fam.members.front();
}

// ---------------------------------------------------------------------------
// Galerkin convergence diagnostics.

enum class Trend { decreasing, bounded, growing, insufficient };

inline const char* to_string(Trend t) {
  switch (t) {
    case Trend::decreasing: return "decreasing";
    case Trend::bounded: return "bounded";
    case Trend::growing: return "growing";
    case Trend::insufficient: return "insufficient";
  }
  return "insufficient";
}

namespace detail {

inline Trend trend_of(const std::vector<double>& v, double scale) {
  if (v.size() < 2) return Trend::insufficient;
  const double tiny = 1e-12 * (1.0 + scale);
  bool mono = true;
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
    if (v[i + 1] > v[i] * (1.0 + 1e-9) + tiny) mono = false;
  if (mono && v.back() <= 0.9 * v.front() && v.front() > tiny) return Trend::decreasing;
  if (v.back() <= 2.0 * std::max(v.front(), tiny)) return Trend::bounded;
  return Trend::growing;
}

}  // namespace detail

struct GalerkinRow {
  int m = 0;           // truncation size (n_plus of the member)
  bool solved = false;
  std::string error;   // error-code name when not solved
  double k_norm = 0.0;
  double k_diff = 0.0;     // ||pad(K_m) - K_final||
  double surrogate = 0.0;  // ||pad(K_m G_m K_m) - K G K||
  double g_norm = 0.0;     // ||G(mu)|| of the member
  double r_sup = 0.0;      // sup of ||R|| over the admissible mu grid
  double pair_left = 0.0, pair_right = 0.0;
};

struct GalerkinReport {
  Complex mu;
  std::vector<GalerkinRow> rows;
  Trend k_trend = Trend::insufficient;          // k_diff, final row excluded
  Trend surrogate_trend = Trend::insufficient;  // same convention
  Trend g_trend = Trend::insufficient;          // per-member ||G(mu)||
  Trend r_trend = Trend::insufficient;          // per-member R sup
  Trend pair_trend = Trend::insufficient;
  EnvelopeCurve final_envelope;  // G/F/R/S norms along the real ray, last member
};

// Solves every member (spectral solver, continuation fallback), compares each
// K_m against the last member's K, and assembles the uniform-topology product
// surrogate together with the transfer-norm trends. Per-member solver
// failures are recorded, not fatal; the last member must solve.
inline GalerkinReport galerkin_convergence(const OperatorFamily& fam,
                                           std::optional<Complex> mu_opt = {}) {
  if (fam.members.empty())
    throw KreinError(ErrorCode::invalid_params, "galerkin_convergence: empty family");
  const BlockOperator& big = fam.members.back();
  GalerkinReport rep;
  rep.mu = mu_opt ? *mu_opt : (fam.mu0 ? *fam.mu0 : default_mu(big));

  auto solve_member = [](const BlockOperator& a) -> Matrix {
    try {
      return solve_angle_spectral(a, SolveOptions{.force = true}).angle.K;
    } catch (const KreinError&) {
      return solve_angle_continuation(a).angle.K;  // degenerate-gap fallback
    }
  };

  Matrix k_final = solve_member(big);
  Matrix g_final = eval_transfer(big, rep.mu).G;
  Matrix prod_final = k_final * g_final * k_final;
  const Eigen::Index nf = big.structure.n_plus;

  for (const BlockOperator& member : fam.members) {
    GalerkinRow row;
    row.m = member.structure.n_plus;
    try {
      Matrix k = solve_member(member);
      TransferEval te = eval_transfer(member, rep.mu);
      row.solved = true;
      row.k_norm = detail::spectral_norm(k);
      Matrix k_pad = Matrix::Zero(k.rows(), nf);
      k_pad.leftCols(row.m) = k;
      row.k_diff = detail::spectral_norm(k_pad - k_final);
      Matrix prod = k * te.G * k;
      Matrix prod_pad = Matrix::Zero(prod.rows(), nf);
      prod_pad.leftCols(row.m) = prod;
      row.surrogate = detail::spectral_norm(prod_pad - prod_final);
      row.g_norm = te.g_norm;
      for (const EnvelopeSample& s : envelope(member).samples)
        if (s.admissible) row.r_sup = std::max(row.r_sup, s.r_norm);
      PairNorms pn = pair_norms(member, 0.5);
      row.pair_left = pn.left;
      row.pair_right = pn.right;
    } catch (const KreinError& e) {
      row.solved = false;
      row.error = to_string(e.code());
    }
    rep.rows.push_back(std::move(row));
  }

  double scale = detail::spectral_norm_estimate(big.assemble());
  std::vector<double> kd, sg, gn, rs, pr;
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const GalerkinRow& r = rep.rows[i];
    if (!r.solved) continue;
    if (i + 1 < rep.rows.size()) {  // final row compares K_final to itself
      kd.push_back(r.k_diff);
      sg.push_back(r.surrogate);
    }
    gn.push_back(r.g_norm);
    rs.push_back(r.r_sup);
    pr.push_back(std::max(r.pair_left, r.pair_right));
  }
  rep.k_trend = detail::trend_of(kd, 1.0);
  rep.surrogate_trend = detail::trend_of(sg, 1.0);
  rep.g_trend = detail::trend_of(gn, scale);
  rep.r_trend = detail::trend_of(rs, scale);
  rep.pair_trend = detail::trend_of(pr, scale);

  {  // transfer-norm envelope along the real ray of the largest member
    double t0 = 1.0 + scale;
    std::vector<Complex> ray;
    for (int k = 0; k <= 12; ++k) ray.emplace_back(-std::ldexp(t0, k), 0.0);
    rep.final_envelope = envelope(big, ray);
  }
  return rep;
}

// Truncation-schedule convenience: sections of a single operator.
inline GalerkinReport galerkin_convergence(const BlockOperator& a, const std::vector<int>& schedule,
                                           std::optional<Complex> mu_opt = {}) {
  if (schedule.empty())
    throw KreinError(ErrorCode::invalid_params, "galerkin_convergence: empty schedule");
  OperatorFamily fam;
  fam.description = "truncation schedule";
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (i > 0 && schedule[i] <= schedule[i - 1])
      throw KreinError(ErrorCode::invalid_params,
                       "galerkin_convergence: schedule must be strictly increasing");
    fam.members.push_back(truncate(a, schedule[i]));
  }
  fam.nested = true;
  return galerkin_convergence(fam, mu_opt);
}

// OperatorFamily front-end for the type-0 theorem checker (uses the family's
// construction point mu0 when present).
inline Thm31Verdict check_thm31_hypotheses(const OperatorFamily& fam, double alpha = 0.5) {
  return check_thm31_hypotheses(fam.members, alpha, fam.mu0);
}

}  // namespace krein
