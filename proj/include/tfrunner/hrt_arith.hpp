#pragma once

// Arithmetic building blocks of the four-point analysis: configuration
// classification, phase perturbations for one-relation frequency sets,
// trigonometric-polynomial checks and the exponential-model feasibility
// tests for two horizontal pairs.

#include "tfrunner/gabor.hpp"
#include "tfrunner/rational_structure.hpp"

#include <algorithm>
#include <array>
#include <numbers>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tfr {

constexpr double kOmegaTieTolerance = 1e-12;

enum class CaseKind { Case1, Case2, Case3, Case4, Case5 };
enum class Subcase { None, Case1AffineDimHigh, Case1Extremal123, Case1Generic, Case5Rational, Case5Irrational };

struct CaseTag {
  CaseKind tag = CaseKind::Case1;
  Subcase subcase = Subcase::None;

  bool operator==(const CaseTag&) const = default;
};

inline std::string to_string(CaseKind k) {
  switch (k) {
    case CaseKind::Case1: return "Case1";
    case CaseKind::Case2: return "Case2";
    case CaseKind::Case3: return "Case3";
    case CaseKind::Case4: return "Case4";
    case CaseKind::Case5: return "Case5";
  }
  return "?";
}

inline std::string to_string(Subcase s) {
  switch (s) {
    case Subcase::None: return "";
    case Subcase::Case1AffineDimHigh: return "Case1AffineDimHigh";
    case Subcase::Case1Extremal123: return "Case1Extremal123";
    case Subcase::Case1Generic: return "Case1Generic";
    case Subcase::Case5Rational: return "Case5Rational";
    case Subcase::Case5Irrational: return "Case5Irrational";
  }
  return "?";
}

/// Frequency comparisons shared by the classifier and the pipelines: exact
/// when the point set carries exact frequencies, otherwise within 1e-12.
inline bool same_omega(const PointSet& ps, std::size_t a, std::size_t b) {
  if (ps.exact()) return *ps[a].omega_exact == *ps[b].omega_exact;
  return std::abs(ps[a].omega - ps[b].omega) <= kOmegaTieTolerance;
}

inline std::size_t omega_affine_dimension(const PointSet& ps) {
  if (ps.exact()) return affine_dimension(ps.exact_omegas());
  return float_affine_dimension(ps.omegas());
}

/// Indices sorted by omega (ties by tau).
inline std::vector<std::size_t> omega_order(const PointSet& ps) {
  std::vector<std::size_t> idx(ps.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (!same_omega(ps, a, b)) return ps[a].omega < ps[b].omega;
    return ps[a].tau < ps[b].tau;
  });
  return idx;
}

struct Classification {
  CaseTag tag;
  std::vector<std::size_t> order;  // indices into the input, sorted by omega
  std::array<bool, 3> equal{};     // equality of consecutive sorted omegas
  std::optional<std::pair<std::int64_t, std::int64_t>> tau_ratio;  // Case 5: tau / tau1 = m / n
};

inline Classification classify_4pt_detailed(const PointSet& lambda) {
  if (lambda.size() != 4) throw std::invalid_argument("classify_4pt needs exactly four points");
  lambda.validate();
  Classification c;
  c.order = omega_order(lambda);
  for (std::size_t i = 0; i < 3; ++i) c.equal[i] = same_omega(lambda, c.order[i], c.order[i + 1]);
  const auto [e0, e1, e2] = c.equal;
  const int n_eq = e0 + e1 + e2;
  if (n_eq == 0) {
    c.tag.tag = CaseKind::Case1;
    if (omega_affine_dimension(lambda) >= 2) {
      c.tag.subcase = Subcase::Case1AffineDimHigh;
    } else {
      const auto& o = c.order;
      bool extremal;
      if (lambda.exact()) {
        const auto w0 = *lambda[o[0]].omega_exact;
        extremal = is_proportional_123(*lambda.basis, *lambda[o[1]].omega_exact - w0, *lambda[o[2]].omega_exact - w0,
                                       *lambda[o[3]].omega_exact - w0);
      } else {
        const double w0 = lambda[o[0]].omega;
        extremal = is_proportional_123(lambda[o[1]].omega - w0, lambda[o[2]].omega - w0, lambda[o[3]].omega - w0);
      }
      c.tag.subcase = extremal ? Subcase::Case1Extremal123 : Subcase::Case1Generic;
    }
  } else if (n_eq == 3) {
    c.tag.tag = CaseKind::Case4;
  } else if (n_eq == 1) {
    c.tag.tag = CaseKind::Case2;
  } else if (e0 && e2) {
    c.tag.tag = CaseKind::Case5;
    const double tau1 = std::abs(lambda[c.order[1]].tau - lambda[c.order[0]].tau);
    const double tau = std::abs(lambda[c.order[3]].tau - lambda[c.order[2]].tau);
    const std::vector<double> pair{tau, tau1};
    if (auto p = float_relation_guess(pair, 64, 1e-9)) {
      c.tau_ratio = std::make_pair(std::abs((*p)[1]), std::abs((*p)[0]));
      c.tag.subcase = Subcase::Case5Rational;
    } else {
      c.tag.subcase = Subcase::Case5Irrational;
    }
  } else {
    c.tag.tag = CaseKind::Case3;
  }
  return c;
}

inline CaseTag classify_4pt(const PointSet& lambda) { return classify_4pt_detailed(lambda).tag; }

// ---------------------------------------------------------------------------

class SmallRelation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct PerturbationResult {
  std::vector<double> phis;
  double alpha_residual = 0;
};

/// Phases phi_k = beta sign(p_k) with sum p_k phi_k = -alpha (mod 1) and
/// |phi_k| <= 1/(2 sum|p_k|).
inline PerturbationResult perturbation_phis(const IntVector& p, double alpha) {
  if (!std::isfinite(alpha)) throw std::invalid_argument("alpha must be finite");
  std::int64_t S = 0;
  for (auto v : p) S += std::abs(v);
  if (S == 0) throw std::invalid_argument("relation vector must be nonzero");
  const double a = -alpha - std::nearbyint(-alpha);
  if (S <= 2 && a != 0) throw SmallRelation("relation with sum |p_k| <= 2 needs the reduction branch");
  const double beta = a / static_cast<double>(S);
  PerturbationResult r;
  long double sum = 0;
  for (auto v : p) {
    const double phi = v > 0 ? beta : (v < 0 ? -beta : 0.0);
    r.phis.push_back(phi);
    sum += static_cast<long double>(v) * phi;
  }
  const long double z = sum + alpha;
  r.alpha_residual = static_cast<double>(std::abs(z - std::nearbyint(z)));
  return r;
}

// ---------------------------------------------------------------------------

struct TrigPolyCheck {
  bool is_nonvanishing = false;
  double max_modulus = 0;
  double max_modulus_at = 0;
};

/// P(w) = sum_j c_j e^{2 pi i tau_j w} on m midpoints of [lo, hi).
inline TrigPolyCheck case4_trig_poly_check(const std::vector<Complex>& c, const std::vector<double>& taus,
                                           std::size_t m = 4096, double lo = -4.0, double hi = 4.0,
                                           double tolerance = 1e-9) {
  if (c.size() != taus.size() || c.empty()) throw std::invalid_argument("coefficients and taus differ in length");
  if (std::all_of(c.begin(), c.end(), [](const Complex& z) { return z == Complex(0); }))
    throw std::invalid_argument("trigonometric polynomial with all-zero coefficients");
  if (m < 1 || !(hi > lo)) throw std::invalid_argument("invalid evaluation grid");
  TrigPolyCheck out;
  const double h = (hi - lo) / static_cast<double>(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double w = lo + (static_cast<double>(i) + 0.5) * h;
    Complex s = 0;
    for (std::size_t j = 0; j < c.size(); ++j) s += c[j] * std::polar(1.0, 2.0 * std::numbers::pi * taus[j] * w);
    if (std::abs(s) > out.max_modulus) {
      out.max_modulus = std::abs(s);
      out.max_modulus_at = w;
    }
  }
  out.is_nonvanishing = out.max_modulus > tolerance;
  return out;
}

// ---------------------------------------------------------------------------

struct Case5Feasibility {
  bool feasible = false;
  std::optional<double> C0;
  std::string reason;
  double exponent_gap = 0;  // |tau1 ln C - tau ln c|
  // Growth witness for irrational tau / tau1: 0 < |m tau1 - n tau| < eps and
  // the factor relating f(t + m tau1 - n tau) to f(t) exceeds 1.
  std::optional<std::pair<std::int64_t, std::int64_t>> growth_mn;
  std::optional<double> growth_factor;
};

inline Case5Feasibility case5_feasibility(double c, double C, double tau, double tau1) {
  if (!(c > 0 && C > 0 && tau > 0 && tau1 > 0) || !std::isfinite(c) || !std::isfinite(C) || !std::isfinite(tau) ||
      !std::isfinite(tau1))
    throw std::invalid_argument("case5_feasibility needs positive finite inputs");
  Case5Feasibility r;
  r.exponent_gap = std::abs(tau1 * std::log(C) - tau * std::log(c));
  if (c >= 1 || C >= 1) {
    r.reason = "not square-integrable";
    return r;
  }
  if (r.exponent_gap <= 1e-10) {
    r.feasible = true;
    r.C0 = std::pow(C, 1.0 / tau);
    r.reason = "exponential model";
    return r;
  }
  r.reason = "exponent mismatch: C^tau1 != c^tau";
  const std::vector<double> pair{tau, tau1};
  if (float_relation_guess(pair, 64, 1e-9)) return r;

  // f(t + m tau1 - n tau) = C^{-n} c^m f(t). When C^tau1 < c^tau the factor
  // exceeds 1 for m tau1 - n tau small and positive; otherwise for it small
  // and negative.
  const double lc = std::log(c), lC = std::log(C);
  const bool positive_side = tau1 * lC < tau * lc;
  const double delta = positive_side ? tau1 * lC / lc - tau : tau * lc / lC - tau1;
  const double eps = positive_side ? delta * lc / lC : delta * lC / lc;
  for (std::int64_t n = 1; n <= 10'000'000; ++n) {
    const double x = static_cast<double>(n) * tau / tau1;
    const auto m = static_cast<std::int64_t>(positive_side ? std::floor(x) + 1 : std::ceil(x) - 1);
    if (m < 1) continue;
    const double gap = static_cast<double>(m) * tau1 - static_cast<double>(n) * tau;
    if ((positive_side ? gap > 0 && gap < eps : gap < 0 && -gap < eps)) {
      const double log_factor = -static_cast<double>(n) * lC + static_cast<double>(m) * lc;
      r.growth_mn = std::make_pair(m, n);
      r.growth_factor = std::exp(positive_side ? log_factor : -log_factor);
      r.reason += "; C^{-n} c^m > 1 growth contradicts square-integrability";
      break;
    }
  }
  return r;
}

struct KhinchinCheck {
  double empirical_average = 0;
  double integral = 0;
  double deviation = 0;
  bool rational_ratio = false;
};

/// Birkhoff average of F(x) = C0^{2 (t0 + tau1 {x})} along x + n tau / tau1
/// against its integral over one period.
inline KhinchinCheck khinchin_average_check(double C0, double tau, double tau1, double t0, std::int64_t N,
                                            double x = 0.5) {
  if (N < 1) throw std::invalid_argument("N must be at least 1");
  if (!(C0 > 0 && C0 < 1)) throw std::invalid_argument("C0 must lie in (0, 1)");
  if (!(tau > 0 && tau1 > 0)) throw std::invalid_argument("tau and tau1 must be positive");
  const long double alpha = static_cast<long double>(tau) / tau1;
  const double lc = std::log(C0);
  auto F = [&](long double u) {
    const long double frac = u - std::floor(u);
    return std::exp(2.0 * lc * (t0 + tau1 * static_cast<double>(frac)));
  };
  KhinchinCheck r;
  long double acc = 0;
  for (std::int64_t n = 1; n <= N; ++n) acc += F(x + static_cast<long double>(n) * alpha);
  r.empirical_average = static_cast<double>(acc / static_cast<long double>(N));
  r.integral = std::exp(2.0 * lc * t0) * (std::exp(2.0 * lc * tau1) - 1.0) / (2.0 * tau1 * lc);
  r.deviation = std::abs(r.empirical_average - r.integral);
  const std::vector<double> pair{tau, tau1};
  r.rational_ratio = float_relation_guess(pair, 64, 1e-9).has_value();
  return r;
}

}  // namespace tfr
