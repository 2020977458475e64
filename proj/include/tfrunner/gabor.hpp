#pragma once

// Time-frequency shifts M_omega T_tau f, discretized Gram matrices of finite
// Gabor systems, and normalizations of the point set.

#include "tfrunner/function_model.hpp"
#include "tfrunner/rational_structure.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace tfr {

using Complex = std::complex<double>;

struct TFPoint {
  double tau = 0.0;
  double omega = 0.0;
  std::optional<ExactReal> omega_exact;

  bool same_as(const TFPoint& o) const {
    if (tau != o.tau) return false;
    if (omega_exact && o.omega_exact) return *omega_exact == *o.omega_exact;
    return omega == o.omega;
  }
};

struct PointSet {
  std::vector<TFPoint> points;
  std::optional<RealBasis> basis;  // set when every omega carries an exact value

  std::size_t size() const { return points.size(); }
  const TFPoint& operator[](std::size_t i) const { return points[i]; }

  bool exact() const {
    if (!basis) return false;
    for (const auto& p : points)
      if (!p.omega_exact) return false;
    return true;
  }

  std::vector<double> omegas() const {
    std::vector<double> out;
    for (const auto& p : points) out.push_back(p.omega);
    return out;
  }
  std::vector<double> taus() const {
    std::vector<double> out;
    for (const auto& p : points) out.push_back(p.tau);
    return out;
  }
  std::vector<ExactReal> exact_omegas() const {
    std::vector<ExactReal> out;
    for (const auto& p : points) out.push_back(*p.omega_exact);
    return out;
  }

  void validate() const {
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (!std::isfinite(points[j].tau) || !std::isfinite(points[j].omega))
        throw std::invalid_argument("time-frequency points must be finite");
      for (std::size_t k = 0; k < j; ++k)
        if (points[j].same_as(points[k])) throw std::invalid_argument("time-frequency points must be distinct");
    }
  }
};

inline PointSet make_points(std::initializer_list<std::pair<double, double>> tau_omega) {
  PointSet ps;
  for (auto [t, w] : tau_omega) ps.points.push_back({t, w, std::nullopt});
  return ps;
}

/// e^{2 pi i omega t} f(t - tau).
inline Complex tf_shift(const FunctionModel& f, const TFPoint& p, double t) {
  return std::polar(f(t - p.tau), 2.0 * std::numbers::pi * p.omega * t);
}

struct SampledSystem {
  std::vector<double> grid;
  std::vector<std::vector<Complex>> vectors;

  double step() const { return grid[1] - grid[0]; }
};

inline std::vector<double> uniform_grid(double T, std::size_t n) {
  if (!(T > 0) || n < 2) throw std::invalid_argument("grid needs T > 0 and n >= 2");
  std::vector<double> g(n);
  const double h = 2.0 * T / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) g[i] = -T + h * static_cast<double>(i);
  g.back() = T;
  return g;
}

inline std::vector<Complex> tf_shift_eval(const FunctionModel& f, const TFPoint& p, std::span<const double> grid) {
  std::vector<Complex> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = tf_shift(f, p, grid[i]);
  return out;
}

inline SampledSystem sample_system(const FunctionModel& f, const PointSet& lambda, double T, std::size_t n) {
  SampledSystem s;
  s.grid = uniform_grid(T, n);
  for (const auto& p : lambda.points) s.vectors.push_back(tf_shift_eval(f, p, s.grid));
  return s;
}

namespace detail {

inline double trapezoid_weight(std::size_t i, std::size_t n, double h) { return (i == 0 || i + 1 == n) ? 0.5 * h : h; }

}  // namespace detail

inline Eigen::MatrixXcd gram_matrix(const SampledSystem& s) {
  const auto m = static_cast<Eigen::Index>(s.vectors.size());
  const std::size_t n = s.grid.size();
  const double h = s.step();
  Eigen::MatrixXcd G(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index k = j; k < m; ++k) {
      Complex acc = 0;
      const auto& gj = s.vectors[static_cast<std::size_t>(j)];
      const auto& gk = s.vectors[static_cast<std::size_t>(k)];
      for (std::size_t i = 0; i < n; ++i) acc += detail::trapezoid_weight(i, n, h) * std::conj(gj[i]) * gk[i];
      G(j, k) = acc;
      G(k, j) = std::conj(acc);
    }
    G(j, j) = G(j, j).real();
  }
  return G;
}

inline Eigen::MatrixXcd gram_matrix(const FunctionModel& f, const PointSet& lambda, double T = 16.0,
                                    std::size_t n = std::size_t{1} << 14) {
  lambda.validate();
  return gram_matrix(sample_system(f, lambda, T, n));
}

/// Quadrature L2 norm of sum_j c_j g_j on the sampled window.
inline double combination_norm(const SampledSystem& s, const Eigen::VectorXcd& c) {
  const std::size_t n = s.grid.size();
  const double h = s.step();
  double acc = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Complex v = 0;
    for (std::size_t j = 0; j < s.vectors.size(); ++j) v += c(static_cast<Eigen::Index>(j)) * s.vectors[j][i];
    acc += detail::trapezoid_weight(i, n, h) * std::norm(v);
  }
  return std::sqrt(acc);
}

constexpr double kNullThreshold = 1e-8;

struct IndependenceScore {
  double min_eigenvalue = 0;
  double trace = 0;
  Eigen::VectorXd eigenvalues;
  Eigen::VectorXcd min_vector;  // unit eigenvector of the smallest eigenvalue
  std::optional<Eigen::VectorXcd> null_vector;
  double residual = 0;  // quadrature norm of sum_j min_vector_j g_j

  bool dependent() const { return null_vector.has_value(); }
  double relative_min() const { return trace > 0 ? min_eigenvalue / trace : 0.0; }
};

inline IndependenceScore independence_score(const SampledSystem& s, double null_threshold = kNullThreshold) {
  const Eigen::MatrixXcd G = gram_matrix(s);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(G);
  if (eig.info() != Eigen::Success) throw std::runtime_error("Gram eigen-decomposition failed");
  IndependenceScore out;
  out.eigenvalues = eig.eigenvalues();
  out.min_eigenvalue = out.eigenvalues(0);
  out.trace = G.trace().real();
  out.min_vector = eig.eigenvectors().col(0).normalized();
  out.residual = combination_norm(s, out.min_vector);
  if (out.min_eigenvalue <= null_threshold * out.trace) out.null_vector = out.min_vector;
  return out;
}

inline IndependenceScore independence_score(const FunctionModel& f, const PointSet& lambda, double T = 16.0,
                                            std::size_t n = std::size_t{1} << 14,
                                            double null_threshold = kNullThreshold) {
  lambda.validate();
  if (lambda.points.empty()) throw std::invalid_argument("empty point set");
  return independence_score(sample_system(f, lambda, T, n), null_threshold);
}

struct NormalizedSystem {
  TFPoint origin;  // the point moved to (0, 0)
  std::size_t origin_index = 0;
  PointSet points;
  FunctionModel f;
};

/// Translate Lambda so that the point with minimal omega (then minimal tau)
/// sits at the origin, and shift f by its tau accordingly.
inline NormalizedSystem normalize_origin(const FunctionModel& f, const PointSet& lambda) {
  if (lambda.points.empty()) throw std::invalid_argument("normalize_origin needs a nonempty point set");
  lambda.validate();
  const bool exact = lambda.exact();
  auto less = [&](const TFPoint& a, const TFPoint& b) {
    if (exact && !(*a.omega_exact == *b.omega_exact)) return a.omega < b.omega;
    if (!exact && a.omega != b.omega) return a.omega < b.omega;
    return a.tau < b.tau;
  };
  std::size_t idx = 0;
  for (std::size_t j = 1; j < lambda.size(); ++j)
    if (less(lambda[j], lambda[idx])) idx = j;
  const TFPoint o = lambda[idx];
  NormalizedSystem out{o, idx, {{}, lambda.basis}, f.shifted(o.tau)};
  for (const auto& p : lambda.points) {
    TFPoint q{p.tau - o.tau, p.omega - o.omega, std::nullopt};
    if (exact) {
      q.omega_exact = *p.omega_exact - *o.omega_exact;
      q.omega = q.omega_exact->to_double(*lambda.basis);
    }
    out.points.points.push_back(q);
  }
  return out;
}

class DetNotOne : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Matrix2 = std::array<std::array<double, 2>, 2>;

/// Image of Lambda under (tau, omega) -> A (tau, omega). Exact frequencies are
/// dropped since the image mixes time into frequency.
inline PointSet apply_metaplectic(const PointSet& lambda, const Matrix2& A) {
  const double det = A[0][0] * A[1][1] - A[0][1] * A[1][0];
  if (!(std::abs(det - 1.0) <= 1e-12)) throw DetNotOne("metaplectic matrix must have determinant 1");
  PointSet out;
  for (const auto& p : lambda.points)
    out.points.push_back({A[0][0] * p.tau + A[0][1] * p.omega, A[1][0] * p.tau + A[1][1] * p.omega, std::nullopt});
  return out;
}

inline Matrix2 fourier_rotation() { return {{{0.0, -1.0}, {1.0, 0.0}}}; }

/// |f(t) - sum_k c_k e^{2 pi i omega_k t} f(t - tau_k)| for the points other
/// than the origin.
inline double dependence_residual(const FunctionModel& f, std::span<const TFPoint> others, std::span<const Complex> c,
                                  double t) {
  if (others.size() != c.size()) throw std::invalid_argument("one coefficient per non-origin point is required");
  Complex s = f(t);
  for (std::size_t k = 0; k < others.size(); ++k) s -= c[k] * tf_shift(f, others[k], t);
  return std::abs(s);
}

/// |sum_j d_j e^{2 pi i omega_j t} f(t - tau_j)| over all points.
inline double relation_residual(const FunctionModel& f, std::span<const TFPoint> points, std::span<const Complex> d,
                                double t) {
  if (points.size() != d.size()) throw std::invalid_argument("one coefficient per point is required");
  Complex s = 0;
  for (std::size_t j = 0; j < points.size(); ++j) s += d[j] * tf_shift(f, points[j], t);
  return std::abs(s);
}

}  // namespace tfr
