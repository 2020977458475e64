#pragma once

// Exact integer lattice primitives: unimodular row echelon form and LLL
// reduction with rational Gram-Schmidt data. Dimensions in this library are
// small (a handful of frequencies), so the cubic-per-swap recomputation in
// lll_reduce is not a concern.

#include "tfrunner/rational.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace tfr::lattice {

using IntRow = std::vector<Integer>;
using IntMatrix = std::vector<IntRow>;

/// Brings the leading `key_cols` columns of `rows` to row echelon form using
/// only unimodular row operations (swaps and integer row additions). Columns
/// past `key_cols` ride along, which is how callers track the transform.
/// Returns the number of nonzero rows in the key block; those rows come first.
inline std::size_t echelonize(IntMatrix& rows, std::size_t key_cols) {
  std::size_t pivot_row = 0;
  const std::size_t n = rows.size();
  for (std::size_t col = 0; col < key_cols && pivot_row < n; ++col) {
    while (true) {
      std::size_t best = n;
      for (std::size_t r = pivot_row; r < n; ++r) {
        if (rows[r][col] == 0) continue;
        if (best == n || abs(rows[r][col]) < abs(rows[best][col])) best = r;
      }
      if (best == n) break;
      std::swap(rows[pivot_row], rows[best]);
      bool reduced = true;
      for (std::size_t r = pivot_row + 1; r < n; ++r) {
        if (rows[r][col] == 0) continue;
        Integer q = rows[r][col] / rows[pivot_row][col];
        for (std::size_t c = 0; c < rows[r].size(); ++c) rows[r][c] -= q * rows[pivot_row][c];
        if (rows[r][col] != 0) reduced = false;
      }
      if (reduced) {
        ++pivot_row;
        break;
      }
    }
  }
  return pivot_row;
}

namespace detail {

inline Rational dot(const IntRow& a, const IntRow& b) {
  Integer s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return Rational(s);
}

struct GramSchmidt {
  std::vector<std::vector<Rational>> mu;
  std::vector<Rational> norms;  // |b*_i|^2
};

inline GramSchmidt gram_schmidt(const IntMatrix& b) {
  const std::size_t n = b.size();
  GramSchmidt gs;
  gs.mu.assign(n, std::vector<Rational>(n, Rational(0)));
  gs.norms.assign(n, Rational(0));
  // r_ij = <b_i, b*_j> computed through the recurrence avoids storing b*.
  std::vector<std::vector<Rational>> r(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      Rational v = dot(b[i], b[j]);
      for (std::size_t k = 0; k < j; ++k) v -= gs.mu[j][k] * r[i][k];
      r[i][j] = v;
      if (j < i) gs.mu[i][j] = gs.norms[j] == 0 ? Rational(0) : v / gs.norms[j];
    }
    gs.norms[i] = r[i][i];
  }
  return gs;
}

inline Integer round_nearest(const Rational& q) {
  // floor(q + 1/2)
  Rational shifted = q + Rational(1, 2);
  Integer num = numerator(shifted);
  Integer den = denominator(shifted);
  Integer fl = num / den;
  if (num < 0 && fl * den != num) fl -= 1;
  return fl;
}

}  // namespace detail

/// LLL-reduces a basis of linearly independent integer rows in place.
inline void lll_reduce(IntMatrix& basis, const Rational& delta = Rational(3, 4)) {
  const std::size_t n = basis.size();
  if (n < 2) return;
  auto gs = detail::gram_schmidt(basis);
  std::size_t k = 1;
  while (k < n) {
    for (std::size_t jj = k; jj-- > 0;) {
      Integer q = detail::round_nearest(gs.mu[k][jj]);
      if (q == 0) continue;
      for (std::size_t c = 0; c < basis[k].size(); ++c) basis[k][c] -= q * basis[jj][c];
      for (std::size_t i = 0; i < jj; ++i) gs.mu[k][i] -= Rational(q) * gs.mu[jj][i];
      gs.mu[k][jj] -= Rational(q);
    }
    const Rational& m = gs.mu[k][k - 1];
    if (gs.norms[k] >= (delta - m * m) * gs.norms[k - 1]) {
      ++k;
    } else {
      std::swap(basis[k], basis[k - 1]);
      gs = detail::gram_schmidt(basis);
      k = k > 1 ? k - 1 : 1;
    }
  }
}

/// Z-basis of { p in Z^n : A p = 0 } for an integer matrix A (rows x n),
/// LLL-reduced. The basis spans the saturated kernel lattice.
inline IntMatrix integer_kernel(const IntMatrix& a, std::size_t n) {
  const std::size_t d = a.size();
  IntMatrix work(n, IntRow(d + n, Integer(0)));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < d; ++i) work[j][i] = a[i][j];
    work[j][d + j] = 1;
  }
  const std::size_t rank = echelonize(work, d);
  IntMatrix kernel;
  for (std::size_t r = rank; r < n; ++r)
    kernel.emplace_back(work[r].begin() + static_cast<std::ptrdiff_t>(d), work[r].end());
  lll_reduce(kernel);
  return kernel;
}

}  // namespace tfr::lattice
