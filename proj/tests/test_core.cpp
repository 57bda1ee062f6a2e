#include <catch_amalgamated.hpp>

#include <complex>

#include "krein/core.hpp"
#include "krein/family.hpp"

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

}  // namespace

TEST_CASE("KreinStructure basics") {
  KreinStructure s{2, 3};
  REQUIRE(s.dim() == 5);

  Matrix j = s.j_matrix();
  REQUIRE(j(0, 0) == Complex(1.0));
  REQUIRE(j(1, 1) == Complex(1.0));
  REQUIRE(j(2, 2) == Complex(-1.0));
  REQUIRE(j(4, 4) == Complex(-1.0));
  REQUIRE(j.cwiseAbs().sum() == Catch::Approx(5.0));

  Vector x(5);
  x << 1, 2, 3, 4, 5;
  Vector jx = s.apply_j(x);
  REQUIRE((jx - j * x).norm() == 0.0);

  SECTION("degenerate structures rejected") {
    REQUIRE_THROWS_AS(KreinStructure(0, 0), KreinError);
    REQUIRE_THROWS_AS(KreinStructure(-1, 2), KreinError);
  }
}

TEST_CASE("j_inner is a J-metric sesquilinear form") {
  KreinStructure s{1, 1};
  Vector x(2), y(2);
  x << Complex(1, 1), Complex(0, 2);
  y << Complex(2, 0), Complex(1, -1);

  // [x, y] = y^* J x, conjugate-linear in the second slot
  Complex direct = std::conj(y(0)) * x(0) - std::conj(y(1)) * x(1);
  REQUIRE(std::abs(j_inner(s, x, y) - direct) < 1e-15);

  Complex alpha(0.7, -0.3);
  REQUIRE(std::abs(j_inner(s, alpha * x, y) - alpha * j_inner(s, x, y)) < 1e-15);
  REQUIRE(std::abs(j_inner(s, x, alpha * y) - std::conj(alpha) * j_inner(s, x, y)) < 1e-15);
  REQUIRE(std::abs(j_inner(s, x, y) - std::conj(j_inner(s, y, x))) < 1e-15);

  SECTION("neutral vector") {
    Vector n(2);
    n << 1, 1;
    REQUIRE(std::abs(j_inner(s, n, n)) == 0.0);
  }

  SECTION("size mismatch") {
    Vector bad(3);
    bad.setZero();
    REQUIRE_THROWS_AS(j_inner(s, bad, bad), KreinError);
  }
}

TEST_CASE("BlockOperator assembly round trip") {
  detail::Rng rng(42);
  KreinStructure s{3, 2};
  Matrix full = rng.complex_matrix(5, 5);
  BlockOperator a = BlockOperator::from_full(s, full);
  REQUIRE((a.assemble() - full).norm() == 0.0);
  REQUIRE(a.A11.rows() == 3);
  REQUIRE(a.A22.cols() == 2);

  Matrix ja = a.assemble_ja();
  REQUIRE((ja - s.j_matrix() * full).norm() == 0.0);

  SECTION("shape errors") {
    REQUIRE_THROWS_AS(BlockOperator::from_full(s, rng.complex_matrix(4, 4)), KreinError);
    REQUIRE_THROWS_AS(BlockOperator(s, a.A11, a.A12, a.A21, Matrix::Zero(3, 3)), KreinError);
  }

  SECTION("non-finite entries rejected") {
    Matrix bad = full;
    bad(1, 1) = Complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
    try {
      BlockOperator::from_full(s, bad);
      FAIL("expected nonfinite_entry");
    } catch (const KreinError& e) {
      REQUIRE(e.code() == ErrorCode::nonfinite_entry);
    }
  }
}

TEST_CASE("j_adjoint is an involution and satisfies the metric identity") {
  detail::Rng rng(7);
  KreinStructure s{2, 3};
  BlockOperator a = BlockOperator::from_full(s, rng.complex_matrix(5, 5));

  BlockOperator aa = j_adjoint(j_adjoint(a));
  REQUIRE((aa.assemble() - a.assemble()).norm() == 0.0);

  // [Ax, y] = [x, A^[*] y] for all x, y
  BlockOperator adj = j_adjoint(a);
  for (int trial = 0; trial < 10; ++trial) {
    Vector x = rng.complex_vector(5), y = rng.complex_vector(5);
    Complex lhs = j_inner(s, a.assemble() * x, y);
    Complex rhs = j_inner(s, x, adj.assemble() * y);
    REQUIRE(std::abs(lhs - rhs) < 1e-12 * (1.0 + std::abs(lhs)));
  }
}

TEST_CASE("dissipativity verdicts") {
  SECTION("strictly dissipative diagonal") {
    // A = diag(-1, 2): JA = diag(-1, -2), margin 1
    BlockOperator a = two_by_two(-1, 0, 0, 2);
    DissipativityVerdict v = check_dissipativity(a);
    REQUIRE(v.j_dissipative);
    REQUIRE(v.uniform_margin == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(v.max_real_numeric == Catch::Approx(-1.0).margin(1e-12));
  }

  SECTION("neutral coupling: margin exactly zero") {
    BlockOperator a = two_by_two(0, 1, 1, 0);  // JA skew-adjoint
    DissipativityVerdict v = check_dissipativity(a);
    REQUIRE(v.j_dissipative);
    REQUIRE(v.uniform_margin == Catch::Approx(0.0).margin(1e-14));
  }

  SECTION("not dissipative") {
    BlockOperator a = two_by_two(1, 0, 0, -1);  // JA = identity
    DissipativityVerdict v = check_dissipativity(a);
    REQUIRE_FALSE(v.j_dissipative);
    REQUIRE(v.max_real_numeric == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(v.uniform_margin == 0.0);
  }

  SECTION("generated strict instances hit the requested margin") {
    for (std::uint64_t seed : {1, 2, 3}) {
      GeneratorParams p;
      p.n_plus = 4;
      p.n_minus = 3;
      p.epsilon = 0.25;
      p.seed = seed;
      BlockOperator a = generate_one(GeneratorKind::random_strict, p);
      DissipativityVerdict v = check_dissipativity(a);
      REQUIRE(v.j_dissipative);
      REQUIRE(v.uniform_margin == Catch::Approx(0.25).margin(1e-10));
    }
  }
}

TEST_CASE("factorization identities hold for arbitrary block operators") {
  detail::Rng rng(11);
  std::vector<Complex> mus = {Complex(-1, 0), Complex(-3, 2), Complex(-0.5, -1)};

  for (int trial = 0; trial < 20; ++trial) {
    int np = 1 + int(rng.next_u64() % 5);
    int nm = 1 + int(rng.next_u64() % 5);
    KreinStructure s{np, nm};
    Matrix full = (trial % 2 == 0) ? rng.complex_matrix(np + nm, np + nm)
                                   : rng.real_matrix(np + nm, np + nm);
    // keep mu away from sigma(A22): shift A22 to the right half-plane
    full.bottomRightCorner(nm, nm) += 3.0 * Matrix::Identity(nm, nm);
    BlockOperator a = BlockOperator::from_full(s, full);

    for (Complex mu : mus) {
      REQUIRE(factorization_residual(a, mu) < 1e-12);
      for (int k = 0; k < 5; ++k) {
        Vector xp = rng.complex_vector(np);
        REQUIRE(quadratic_identity_residual(a, mu, xp) < 1e-12);
      }
    }
  }
}

TEST_CASE("mu admissibility is enforced") {
  BlockOperator a = two_by_two(-1, 1, 1, 2);
  try {
    factorization_residual(a, Complex(2.0, 0.0));  // mu = sigma(A22)
    FAIL("expected mu_in_spectrum");
  } catch (const KreinError& e) {
    REQUIRE(e.code() == ErrorCode::mu_in_spectrum);
  }

  Vector xp(1);
  xp << 1;
  REQUIRE_THROWS_AS(quadratic_identity_residual(a, Complex(2.0, 0.0), xp), KreinError);

  SECTION("x_plus dimension checked") {
    Vector bad(2);
    bad.setZero();
    REQUIRE_THROWS_AS(quadratic_identity_residual(a, Complex(-1.0, 0.0), bad), KreinError);
  }
}

TEST_CASE("norm estimate tracks the exact spectral norm") {
  detail::Rng rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix m = rng.complex_matrix(8, 8);
    double est = detail::spectral_norm_estimate(m);
    double exact = detail::spectral_norm(m);
    REQUIRE(est == Catch::Approx(exact).epsilon(1e-8));
  }
}
