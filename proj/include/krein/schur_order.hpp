#pragma once

// Ordered complex Schur decomposition: A = U T U^* with a chosen subset of
// eigenvalues moved to the leading diagonal block, so the first k columns of U
// span the corresponding invariant subspace.
//
// Reordering uses the standard adjacent-swap construction: for a 2x2 upper
// triangular block [[a, b], [0, d]] the unitary G whose first column is the
// normalized eigenvector (b, d - a) of d satisfies G^* T G = [[d, *], [0, a]].

#include <Eigen/Dense>
#include <algorithm>
#include <vector>

#include "krein/detail/linalg.hpp"
#include "krein/error.hpp"

namespace krein {

struct OrderedSchur {
  Matrix U, T;
  int selected_count = 0;
  bool complete = true;  // false if an inseparable (defective, equal) pair blocked a swap
};

namespace detail {

// Swap the diagonal entries at positions k, k+1 of upper-triangular T by a
// unitary similarity, updating U. Returns false when the pair is numerically
// inseparable (equal eigenvalues with non-negligible coupling).
inline bool swap_adjacent(Matrix& t, Matrix& u, Eigen::Index k) {
  const Complex a = t(k, k);
  const Complex b = t(k, k + 1);
  const Complex d = t(k + 1, k + 1);
  const double scale = std::abs(a) + std::abs(d) + std::abs(b) + 1.0;

  if (std::abs(a - d) <= 1e-15 * scale) {
    // Equal eigenvalues: if uncoupled the swap is a no-op; if coupled the pair
    // is defective and cannot be separated.
    return std::abs(b) <= 1e-13 * scale;
  }

  // Eigenvector of the 2x2 block for eigenvalue d.
  Complex v1 = b;
  Complex v2 = d - a;
  double r = std::sqrt(std::norm(v1) + std::norm(v2));
  Complex c = v1 / r;
  Complex s = v2 / r;
  Eigen::Matrix2cd g;
  g << c, -std::conj(s), s, std::conj(c);

  t.middleCols(k, 2) = (t.middleCols(k, 2) * g).eval();
  t.middleRows(k, 2) = (g.adjoint() * t.middleRows(k, 2)).eval();
  u.middleCols(k, 2) = (u.middleCols(k, 2) * g).eval();
  t(k + 1, k) = 0.0;
  return true;
}

// Bubble the entries flagged in `mask` to the leading positions, preserving
// their relative order. Returns false if some swap was blocked by an
// inseparable pair (T, U are then left in a valid but partially ordered state).
inline bool reorder_to_top(Matrix& t, Matrix& u, std::vector<bool> mask) {
  const Eigen::Index n = t.rows();
  bool complete = true;
  Eigen::Index target = 0;
  for (Eigen::Index pos = 0; pos < n; ++pos) {
    if (!mask[pos]) continue;
    Eigen::Index j = pos;
    while (j > target) {
      if (!swap_adjacent(t, u, j - 1)) {
        complete = false;
        break;
      }
      std::swap(mask[j - 1], mask[j]);
      --j;
    }
    ++target;
  }
  return complete;
}

}  // namespace detail

// Compute a complex Schur form with the eigenvalues selected by `select`
// (indexed against the unordered Schur diagonal) moved to the top, preserving
// their relative order. select.size() must equal the dimension.
inline OrderedSchur ordered_schur(const Matrix& m, const std::vector<bool>& select) {
  if (m.rows() != m.cols())
    throw KreinError(ErrorCode::dimension_mismatch, "ordered_schur: square matrix required");
  const Eigen::Index n = m.rows();
  if (static_cast<Eigen::Index>(select.size()) != n)
    throw KreinError(ErrorCode::dimension_mismatch, "ordered_schur: select mask size");

  Eigen::ComplexSchur<Matrix> schur(m);
  if (schur.info() != Eigen::Success)
    throw KreinError(ErrorCode::not_diagonalizable_or_ill_conditioned, "Schur iteration failed");

  OrderedSchur out;
  out.T = schur.matrixT();
  out.U = schur.matrixU();
  out.complete = detail::reorder_to_top(out.T, out.U, select);
  out.selected_count = static_cast<int>(std::count(select.begin(), select.end(), true));
  return out;
}

}  // namespace krein
