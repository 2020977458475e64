#pragma once

// Exact Q-linear structure of finite sets of reals. Reals are carried as
// rational coefficient vectors over a declared basis whose entries the caller
// vouches are linearly independent over Q; under that contract every
// dependence question below is decided exactly.

#include "tfrunner/lattice.hpp"
#include "tfrunner/rational.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tfr {

class RealBasis {
 public:
  RealBasis() : RealBasis({"1"}, {1.0}) {}

  RealBasis(std::vector<std::string> labels, std::vector<double> values)
      : labels_(std::move(labels)), values_(std::move(values)) {
    if (labels_.empty()) throw std::invalid_argument("basis must contain the unit \"1\"");
    if (labels_.size() != values_.size())
      throw std::invalid_argument("basis labels and values differ in length");
    if (labels_.front() != "1" || values_.front() != 1.0)
      throw std::invalid_argument("first basis element must be the unit \"1\" with value 1.0");
    std::set<std::string> seen(labels_.begin(), labels_.end());
    if (seen.size() != labels_.size()) throw std::invalid_argument("basis labels must be distinct");
  }

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<double>& values() const { return values_; }

  friend bool operator==(const RealBasis&, const RealBasis&) = default;

 private:
  std::vector<std::string> labels_;
  std::vector<double> values_;
};

class ExactReal {
 public:
  ExactReal() = default;
  explicit ExactReal(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) {}

  static ExactReal rational(const Rational& q, std::size_t dim) {
    std::vector<Rational> c(dim, Rational(0));
    c.at(0) = q;
    return ExactReal(std::move(c));
  }
  static ExactReal unit(std::size_t index, std::size_t dim) {
    std::vector<Rational> c(dim, Rational(0));
    c.at(index) = 1;
    return ExactReal(std::move(c));
  }

  std::size_t dim() const { return coeffs_.size(); }
  const std::vector<Rational>& coeffs() const { return coeffs_; }
  bool is_zero() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Rational& q) { return q == 0; });
  }

  double to_double(const RealBasis& basis) const {
    if (basis.size() != dim()) throw std::invalid_argument("ExactReal/basis dimension mismatch");
    long double s = 0;
    for (std::size_t i = 0; i < dim(); ++i)
      s += static_cast<long double>(tfr::to_double(coeffs_[i])) * basis.values()[i];
    return static_cast<double>(s);
  }

  ExactReal& operator+=(const ExactReal& o) {
    check_dim(o);
    for (std::size_t i = 0; i < dim(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
  }
  ExactReal& operator-=(const ExactReal& o) {
    check_dim(o);
    for (std::size_t i = 0; i < dim(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
  }
  ExactReal& operator*=(const Rational& q) {
    for (auto& c : coeffs_) c *= q;
    return *this;
  }
  friend ExactReal operator+(ExactReal a, const ExactReal& b) { return a += b; }
  friend ExactReal operator-(ExactReal a, const ExactReal& b) { return a -= b; }
  friend ExactReal operator*(ExactReal a, const Rational& q) { return a *= q; }
  friend ExactReal operator*(const Rational& q, ExactReal a) { return a *= q; }
  friend ExactReal operator-(ExactReal a) { return a *= Rational(-1); }
  friend bool operator==(const ExactReal&, const ExactReal&) = default;

 private:
  void check_dim(const ExactReal& o) const {
    if (o.dim() != dim()) throw std::invalid_argument("ExactReal dimension mismatch");
  }
  std::vector<Rational> coeffs_;
};

/// Basis of the integer relations { p : sum p_j lambda_j = 0 }. Each vector is
/// primitive with its first nonzero entry positive.
struct RelationLattice {
  std::vector<IntVector> basis;

  std::size_t rank() const { return basis.size(); }
  bool empty() const { return basis.empty(); }
};

namespace detail {

inline std::size_t common_dim(std::span<const ExactReal> xs) {
  if (xs.empty()) throw std::invalid_argument("at least one element is required");
  const std::size_t d = xs.front().dim();
  if (d == 0) throw std::invalid_argument("ExactReal with empty coefficient vector");
  for (const auto& x : xs)
    if (x.dim() != d) throw std::invalid_argument("mismatched basis lengths");
  return d;
}

inline std::size_t rational_rank(std::vector<std::vector<Rational>> m) {
  if (m.empty()) return 0;
  const std::size_t cols = m.front().size();
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < m.size(); ++c) {
    std::size_t piv = rank;
    while (piv < m.size() && m[piv][c] == 0) ++piv;
    if (piv == m.size()) continue;
    std::swap(m[piv], m[rank]);
    for (std::size_t r = rank + 1; r < m.size(); ++r) {
      if (m[r][c] == 0) continue;
      Rational f = m[r][c] / m[rank][c];
      for (std::size_t k = c; k < cols; ++k) m[r][k] -= f * m[rank][k];
    }
    ++rank;
  }
  return rank;
}

inline Integer denominator_lcm(std::span<const ExactReal> xs) {
  Integer l = 1;
  for (const auto& x : xs)
    for (const auto& q : x.coeffs()) l = lcm(l, denominator(q));
  return l;
}

inline IntVector normalized(const lattice::IntRow& row) {
  IntVector v;
  v.reserve(row.size());
  for (const auto& z : row) v.push_back(to_int64(z));
  for (auto x : v) {
    if (x == 0) continue;
    if (x < 0)
      for (auto& y : v) y = -y;
    break;
  }
  return v;
}

}  // namespace detail

/// Dimension over Q of span{omega - omega_0 : omega in the set}.
inline std::size_t affine_dimension(std::span<const ExactReal> omegas) {
  detail::common_dim(omegas);
  std::vector<std::vector<Rational>> diffs;
  for (std::size_t i = 1; i < omegas.size(); ++i) diffs.push_back((omegas[i] - omegas[0]).coeffs());
  return detail::rational_rank(std::move(diffs));
}

/// Dimension over Q of span{lambda_j}.
inline std::size_t rational_span_dimension(std::span<const ExactReal> xs) {
  detail::common_dim(xs);
  std::vector<std::vector<Rational>> rows;
  for (const auto& x : xs) rows.push_back(x.coeffs());
  return detail::rational_rank(std::move(rows));
}

inline RelationLattice relation_lattice(std::span<const ExactReal> lambdas) {
  const std::size_t d = detail::common_dim(lambdas);
  const std::size_t n = lambdas.size();
  const Integer scale = detail::denominator_lcm(lambdas);
  lattice::IntMatrix a(d, lattice::IntRow(n, Integer(0)));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < d; ++i) {
      Rational v = lambdas[j].coeffs()[i] * Rational(scale);
      a[i][j] = numerator(v);
    }
  RelationLattice out;
  for (const auto& row : lattice::integer_kernel(a, n)) out.basis.push_back(detail::normalized(row));
  return out;
}

struct SubgroupBasis {
  std::vector<ExactReal> generators;  // Q-linearly independent
  std::vector<IntVector> coords;      // lambda_j == sum_i coords[j][i] * generators[i]
};

/// Free Z-basis of the additive group generated by `lambdas`.
inline SubgroupBasis subgroup_basis(std::span<const ExactReal> lambdas) {
  const std::size_t d = detail::common_dim(lambdas);
  const Integer scale = detail::denominator_lcm(lambdas);
  lattice::IntMatrix rows;
  for (const auto& x : lambdas) {
    lattice::IntRow r(d);
    for (std::size_t i = 0; i < d; ++i) r[i] = numerator(x.coeffs()[i] * Rational(scale));
    rows.push_back(std::move(r));
  }
  const lattice::IntMatrix original = rows;
  const std::size_t m = lattice::echelonize(rows, d);
  rows.resize(m);

  std::vector<std::size_t> pivots;
  for (const auto& r : rows) {
    std::size_t c = 0;
    while (r[c] == 0) ++c;
    pivots.push_back(c);
  }

  SubgroupBasis out;
  for (const auto& r : rows) {
    std::vector<Rational> c(d);
    for (std::size_t i = 0; i < d; ++i) c[i] = Rational(r[i], scale);
    out.generators.emplace_back(std::move(c));
  }
  for (const auto& target : original) {
    lattice::IntRow residual = target;
    IntVector k(m, 0);
    for (std::size_t i = 0; i < m; ++i) {
      const Integer& piv = rows[i][pivots[i]];
      if (residual[pivots[i]] % piv != 0)
        throw std::logic_error("subgroup_basis: element outside the generated lattice");
      Integer q = residual[pivots[i]] / piv;
      for (std::size_t c = 0; c < d; ++c) residual[c] -= q * rows[i][c];
      k[i] = to_int64(q);
    }
    if (std::any_of(residual.begin(), residual.end(), [](const Integer& z) { return z != 0; }))
      throw std::logic_error("subgroup_basis: reconstruction failed");
    out.coords.push_back(std::move(k));
  }
  return out;
}

/// True iff (v1, v2, v3) = c * (1, 2, 3) for some c > 0.
inline bool is_proportional_123(const RealBasis& basis, const ExactReal& v1, const ExactReal& v2,
                                const ExactReal& v3) {
  const double f1 = v1.to_double(basis), f2 = v2.to_double(basis), f3 = v3.to_double(basis);
  if (v1 == v2 || v2 == v3 || v1 == v3) throw std::invalid_argument("velocities must be distinct");
  if (!(0 < f1 && f1 < f2 && f2 < f3))
    throw std::invalid_argument("velocities must satisfy 0 < v1 < v2 < v3");
  const std::vector<ExactReal> gaps{v2 - Rational(2) * v1, v3 - Rational(3) * v1};
  return relation_lattice(gaps).rank() == 2;
}

/// Float counterpart: ratios match 1:2:3 to `rel_tol`.
inline bool is_proportional_123(double v1, double v2, double v3, double rel_tol = 1e-9) {
  if (!(0 < v1 && v1 < v2 && v2 < v3))
    throw std::invalid_argument("velocities must satisfy 0 < v1 < v2 < v3");
  return std::abs(v2 - 2 * v1) <= rel_tol * v3 && std::abs(v3 - 3 * v1) <= rel_tol * v3;
}

// ---------------------------------------------------------------------------
// Heuristic integer-relation detection on floating inputs.

struct FloatRelationOptions {
  std::int64_t height_bound = 64;
  double tolerance = 1e-9;
};

/// All short integer relations visible in an LLL-reduced embedding
/// [I | K x] with K = height_bound / tolerance. The returned vectors are
/// linearly independent; absence of a relation proves nothing.
inline std::vector<IntVector> float_relation_candidates(std::span<const double> x,
                                                        const FloatRelationOptions& opt = {}) {
  if (opt.height_bound < 1) throw std::invalid_argument("height_bound must be >= 1");
  if (x.empty()) return {};
  const std::size_t n = x.size();
  const double k = static_cast<double>(opt.height_bound) / opt.tolerance;
  lattice::IntMatrix basis(n, lattice::IntRow(n + 1, Integer(0)));
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(x[j])) throw std::invalid_argument("non-finite input to relation search");
    basis[j][j] = 1;
    basis[j][n] = Integer(std::nearbyint(x[j] * k));
  }
  lattice::lll_reduce(basis);

  std::vector<IntVector> found;
  for (const auto& row : basis) {
    bool fits = true;
    for (std::size_t j = 0; j < n && fits; ++j)
      fits = abs(row[j]) <= opt.height_bound;
    if (!fits) continue;
    lattice::IntRow p(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(n));
    if (std::all_of(p.begin(), p.end(), [](const Integer& z) { return z == 0; })) continue;
    long double s = 0;
    for (std::size_t j = 0; j < n; ++j) s += static_cast<long double>(to_int64(p[j])) * x[j];
    if (std::abs(s) <= opt.tolerance) found.push_back(detail::normalized(p));
  }
  std::sort(found.begin(), found.end(), [](const IntVector& a, const IntVector& b) {
    auto h = [](const IntVector& v) {
      std::int64_t m = 0;
      for (auto e : v) m = std::max<std::int64_t>(m, std::abs(e));
      return m;
    };
    return h(a) < h(b);
  });
  return found;
}

/// Smallest-height relation p with |sum p_j x_j| <= tolerance and
/// max |p_j| <= height_bound, if lattice reduction exposes one.
inline std::optional<IntVector> float_relation_guess(std::span<const double> x, std::int64_t height_bound,
                                                     double tolerance = 1e-9) {
  auto c = float_relation_candidates(x, {height_bound, tolerance});
  if (c.empty()) return std::nullopt;
  return c.front();
}

/// Affine dimension estimated from floats: (|omega| - 1) minus the number of
/// detected relations among the differences. Heuristic.
inline std::size_t float_affine_dimension(std::span<const double> omegas, const FloatRelationOptions& opt = {}) {
  if (omegas.empty()) throw std::invalid_argument("at least one element is required");
  std::vector<double> diffs;
  for (std::size_t i = 1; i < omegas.size(); ++i) diffs.push_back(omegas[i] - omegas[0]);
  if (diffs.empty()) return 0;
  return diffs.size() - float_relation_candidates(diffs, opt).size();
}

}  // namespace tfr
