#include <catch_amalgamated.hpp>

#include "krein/transfer.hpp"

using namespace krein;

namespace {

BlockOperator two_by_two(Complex a11, Complex a12, Complex a21, Complex a22) {
  Matrix m11(1, 1), m12(1, 1), m21(1, 1), m22(1, 1);
  m11 << a11;
  m12 << a12;
  m21 << a21;
  m22 << a22;
  return BlockOperator(KreinStructure{1, 1}, m11, m12, m21, m22);
}

BlockOperator random_block(int np, int nm, std::uint64_t seed, double a22_shift) {
  detail::Rng rng(seed);
  Matrix full = rng.complex_matrix(np + nm, np + nm);
  full.bottomRightCorner(nm, nm) += a22_shift * Matrix::Identity(nm, nm);
  return BlockOperator::from_full(KreinStructure{np, nm}, full);
}

}  // namespace

TEST_CASE("scalar transfer values") {
  // a = -1, b = 1, c = 1, d = 2, mu = -2: F = G = R = 1/4, S = -5/4
  BlockOperator a = two_by_two(-1, 1, 1, 2);
  TransferEval te = eval_transfer(a, Complex(-2, 0));

  REQUIRE(te.F(0, 0) == Complex(0.25));
  REQUIRE(te.G(0, 0) == Complex(0.25));
  REQUIRE(te.R(0, 0) == Complex(0.25));
  REQUIRE(te.S(0, 0) == Complex(-1.25));
  REQUIRE(te.g_norm == Catch::Approx(0.25));
  REQUIRE(te.s_norm == Catch::Approx(1.25));
  REQUIRE(te.mu == Complex(-2, 0));
}

TEST_CASE("transfer blocks satisfy their defining equations") {
  for (std::uint64_t seed : {3, 4, 5}) {
    BlockOperator a = random_block(4, 3, seed, 4.0);
    Complex mu(-1.5, 0.7);
    TransferEval te = eval_transfer(a, mu);
    const int nm = a.structure.n_minus;

    Matrix shifted = a.A22 - mu * Matrix::Identity(nm, nm);
    REQUIRE((shifted * te.F - a.A21).norm() < 1e-12 * (1.0 + a.A21.norm()));
    REQUIRE((te.G * shifted - a.A12).norm() < 1e-12 * (1.0 + a.A12.norm()));
    REQUIRE((te.R - a.A12 * te.F).norm() < 1e-13);
    REQUIRE((te.S - (a.A11 - te.R)).norm() < 1e-13);

    // independent Schur-complement recomputation
    Matrix s_direct = a.A11 - a.A12 * shifted.fullPivLu().solve(a.A21);
    REQUIRE((te.S - s_direct).norm() < 1e-11 * (1.0 + s_direct.norm()));
  }
}

TEST_CASE("eval_transfer rejects mu in sigma(A22)") {
  BlockOperator a = two_by_two(-1, 1, 1, 2);
  try {
    eval_transfer(a, Complex(2.0, 0.0));
    FAIL("expected mu_in_spectrum");
  } catch (const KreinError& e) {
    REQUIRE(e.code() == ErrorCode::mu_in_spectrum);
  }
  // barely off the spectrum is still rejected by the relative bound
  REQUIRE_THROWS_AS(eval_transfer(a, Complex(2.0 + 1e-14, 0.0)), KreinError);
  REQUIRE_NOTHROW(eval_transfer(a, Complex(2.0 + 1e-6, 0.0)));
}

TEST_CASE("fractional powers") {
  SECTION("diagonal oracle") {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 4.0;
    m(1, 1) = 9.0;
    Matrix h = fractional_power(m, 0.5);
    REQUIRE(std::abs(h(0, 0) - Complex(2.0)) < 1e-12);
    REQUIRE(std::abs(h(1, 1) - Complex(3.0)) < 1e-12);
    REQUIRE(std::abs(h(0, 1)) < 1e-12);
  }

  SECTION("square of the half power") {
    detail::Rng rng(17);
    Matrix m = rng.complex_matrix(5, 5) + 6.0 * Matrix::Identity(5, 5);
    Matrix h = fractional_power(m, 0.5);
    REQUIRE((h * h - m).norm() < 1e-10 * m.norm());
    Matrix full = fractional_power(m, 1.0);
    REQUIRE((full - m).norm() < 1e-10 * m.norm());
  }

  SECTION("branch cut guarded") {
    Matrix m(1, 1);
    m << -1.0;
    try {
      fractional_power(m, 0.5);
      FAIL("expected spectrum_touches_branch_cut");
    } catch (const KreinError& e) {
      REQUIRE(e.code() == ErrorCode::spectrum_touches_branch_cut);
    }
  }

  SECTION("eigenvector conditioning guarded") {
    Matrix m(2, 2);
    m << 1.0, -100.0, 0.0, 2.0;  // eigenvector matrix condition ~ 1e4
    try {
      fractional_power(m, 0.5, /*cond_limit=*/10.0);
      FAIL("expected not_diagonalizable_or_ill_conditioned");
    } catch (const KreinError& e) {
      REQUIRE(e.code() == ErrorCode::not_diagonalizable_or_ill_conditioned);
    }
    REQUIRE_NOTHROW(fractional_power(m, 0.5));  // default limit is fine with it
  }

  SECTION("non-square rejected") {
    REQUIRE_THROWS_AS(fractional_power(Matrix::Zero(2, 3), 0.5), KreinError);
  }
}

TEST_CASE("coupling pair norms") {
  SECTION("scalar oracle, both orientations") {
    // A22 = 1: N = A22 + 1 = 2, left = |A12| 2^alpha, right = 2^{1-alpha} |A21|
    BlockOperator a = two_by_two(-1, 1, 1, 1);
    PairNorms pn = pair_norms(a, 0.5);
    REQUIRE(pn.sign == +1);
    REQUIRE(pn.left == Catch::Approx(std::sqrt(2.0)));
    REQUIRE(pn.right == Catch::Approx(std::sqrt(2.0)));

    // A22 = -3: N = -(A22 + 1) = 2, same norms with the flipped orientation
    BlockOperator b = two_by_two(-1, 1, 1, -3);
    PairNorms qn = pair_norms(b, 0.5);
    REQUIRE(qn.sign == -1);
    REQUIRE(qn.left == Catch::Approx(std::sqrt(2.0)));
    REQUIRE(qn.right == Catch::Approx(std::sqrt(2.0)));
  }

  SECTION("alpha endpoints") {
    BlockOperator a = two_by_two(-1, 1, 1, 1);
    PairNorms p0 = pair_norms(a, 0.0);
    REQUIRE(p0.left == Catch::Approx(1.0));
    REQUIRE(p0.right == Catch::Approx(2.0));
    PairNorms p1 = pair_norms(a, 1.0);
    REQUIRE(p1.left == Catch::Approx(2.0));
    REQUIRE(p1.right == Catch::Approx(1.0));
  }

  SECTION("straddling spectrum rejected") {
    BlockOperator a = two_by_two(-1, 1, 1, -1);  // A22 + 1 = 0
    try {
      pair_norms(a, 0.5);
      FAIL("expected spectrum_touches_branch_cut");
    } catch (const KreinError& e) {
      REQUIRE(e.code() == ErrorCode::spectrum_touches_branch_cut);
    }
  }

  SECTION("alpha range checked") {
    BlockOperator a = two_by_two(-1, 1, 1, 1);
    REQUIRE_THROWS_AS(pair_norms(a, -0.1), KreinError);
    REQUIRE_THROWS_AS(pair_norms(a, 1.1), KreinError);
  }
}

TEST_CASE("norm envelopes along the left ray") {
  BlockOperator a = random_block(3, 3, 23, 5.0);

  SECTION("default samples stay admissible and G decays along the ray") {
    EnvelopeCurve curve = envelope(a);
    REQUIRE(curve.samples.size() == 39);  // 13 radii x 3 directions
    double prev_g = kInf;
    for (std::size_t i = 0; i < curve.samples.size(); i += 3) {
      const EnvelopeSample& s = curve.samples[i];  // the real-axis samples
      REQUIRE(s.admissible);
      REQUIRE(s.g_norm <= prev_g * (1.0 + 1e-9));
      prev_g = s.g_norm;
    }
    // far out on the ray, G ~ ||A12|| / |mu| is small
    REQUIRE(curve.samples[curve.samples.size() - 3].g_norm < 1e-2);
  }

  SECTION("inadmissible samples are recorded, not fatal") {
    BlockOperator b = two_by_two(-1, 1, 1, 2);
    EnvelopeCurve curve = envelope(b, {Complex(2, 0), Complex(-1, 0)});
    REQUIRE_FALSE(curve.samples[0].admissible);
    REQUIRE(curve.samples[1].admissible);
    REQUIRE(curve.samples[1].g_norm == Catch::Approx(1.0 / 3.0));
  }
}
