#pragma once

// Witness-based refutation of specific dependence relations
//
//   sum_j d_j e^{2 pi i omega_j t} f(t - tau_j) = 0
//
// for ultimately positive f. Every branch produces a time t* and a margin
// derived from a sign argument; a witness is accepted only when the original
// relation's residual at t* exceeds half the margin. When no witness is
// accepted, the numerical Gram spectrum of the system is attached as an
// independence or dependence certificate.

#include "tfrunner/gabor.hpp"
#include "tfrunner/hrt_arith.hpp"
#include "tfrunner/lonely_runner.hpp"
#include "tfrunner/torus_approx.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tfr {

using json = nlohmann::json;

enum class Verdict { RefutedDependence, NumericallyDependent, Inconclusive };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::RefutedDependence: return "RefutedDependence";
    case Verdict::NumericallyDependent: return "NumericallyDependent";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

class PreconditionNotMet : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct GramCertificate {
  double min_eigenvalue = 0;
  double trace = 0;
  double relative_min = 0;
  bool dependent = false;
  double residual = 0;
  double window = 16.0;
  std::size_t samples = 0;
  std::vector<Complex> min_vector;
};

struct WitnessReport {
  std::string branch;
  std::optional<CaseTag> case_tag;
  Verdict verdict = Verdict::Inconclusive;
  std::optional<double> witness_time;
  double margin = 0;
  bool heuristic = false;
  json details = json::object();
  std::optional<GramCertificate> certificate;

  void log(json entry) { details["log"].push_back(std::move(entry)); }
  bool refuted() const { return verdict == Verdict::RefutedDependence; }
};

/// 0 for a refutation or an independence certificate, 2 for numerical
/// dependence, 3 otherwise.
inline int exit_code(const WitnessReport& r) {
  if (r.verdict == Verdict::RefutedDependence) return 0;
  if (r.verdict == Verdict::NumericallyDependent) return 2;
  if (r.certificate && !r.certificate->dependent) return 0;
  return 3;
}

struct VerifyOptions {
  double window_start = 0.0;
  double generic_slack = std::sin(2.0 * std::numbers::pi * 1e-3);  // distance 1/4 + 1e-3 from the spectator
  double max_span = 65536.0;
  std::int64_t scan_budget = std::int64_t{1} << 28;
  double gram_window = 16.0;
  std::size_t gram_samples = std::size_t{1} << 14;
  bool attach_certificate = true;
};

// ---------------------------------------------------------------------------
// Relations and their frames.

struct Relation {
  FunctionModel f;
  PointSet points;
  std::vector<Complex> d;
  double norm_factor = 1.0;  // residual of the original relation = norm_factor * residual here

  std::size_t size() const { return points.size(); }

  Complex sum(double t) const {
    Complex s = 0;
    for (std::size_t j = 0; j < size(); ++j) s += d[j] * tf_shift(f, points[j], t);
    return s;
  }
  double residual(double t) const { return std::abs(sum(t)); }

  /// sum_j |d_j f(t - tau_j)|, the natural size of the terms at t.
  double scale(double t) const {
    double s = 0;
    for (std::size_t j = 0; j < size(); ++j) s += std::abs(d[j]) * std::abs(f(t - points[j].tau));
    return s;
  }

  void validate() const {
    points.validate();
    if (points.size() != d.size()) throw std::invalid_argument("one coefficient per point is required");
    for (const auto& z : d)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw std::invalid_argument("non-finite coefficient");
  }
};

/// Moves point j to the origin: f' = T_{tau_j} f, points shifted by -lambda_j
/// and coefficients scaled so that d_j = 1. The same t remains a witness.
inline Relation reorigin(const Relation& r, std::size_t j) {
  if (r.d[j] == Complex(0)) throw std::invalid_argument("cannot re-origin at a zero coefficient");
  Relation out{r.f.shifted(r.points[j].tau), {{}, r.points.basis}, {}, r.norm_factor * std::abs(r.d[j])};
  const bool exact = r.points.exact();
  for (std::size_t k = 0; k < r.size(); ++k) {
    TFPoint p{r.points[k].tau - r.points[j].tau, r.points[k].omega - r.points[j].omega, std::nullopt};
    if (exact) {
      p.omega_exact = *r.points[k].omega_exact - *r.points[j].omega_exact;
      p.omega = p.omega_exact->to_double(*r.points.basis);
    }
    if (k == j) p.tau = 0, p.omega = 0;
    out.points.points.push_back(p);
    out.d.push_back(r.d[k] / r.d[j]);
  }
  return out;
}

/// Complex conjugate of the relation: frequencies and coefficients conjugated.
inline Relation conjugate(const Relation& r) {
  Relation out = r;
  for (auto& p : out.points.points) {
    p.omega = -p.omega;
    if (p.omega_exact) p.omega_exact = -*p.omega_exact;
  }
  for (auto& z : out.d) z = std::conj(z);
  return out;
}

inline json relation_json(const Relation& r) {
  json pts = json::array(), coeffs = json::array();
  for (std::size_t j = 0; j < r.size(); ++j) {
    pts.push_back({r.points[j].tau, r.points[j].omega});
    coeffs.push_back({r.d[j].real(), r.d[j].imag()});
  }
  return {{"points", pts}, {"coefficients", coeffs}, {"shift", r.f.shift()}};
}

namespace detail {

constexpr double kOnsetStep = 1e-6;
constexpr double kScaleFloor = 1e-250;  // below this, relative residuals are meaningless

inline double phase_of(Complex z) { return std::arg(z) / kTwoPi; }

/// Earliest admissible witness time: every shifted copy of f must be past
/// its positivity onset.
inline double search_start(const Relation& r, const VerifyOptions& opts) {
  auto onset = r.f.positivity_onset();
  if (!onset) throw std::invalid_argument("f must be ultimately positive");
  if (!std::isfinite(*onset)) return opts.window_start;
  double tmax = -std::numeric_limits<double>::infinity();
  for (const auto& p : r.points.points) tmax = std::max(tmax, p.tau);
  return std::max(opts.window_start, *onset + tmax + kOnsetStep);
}

inline std::size_t origin_index(const Relation& r) {
  for (std::size_t j = 0; j < r.size(); ++j)
    if (r.points[j].tau == 0 && r.points[j].omega == 0) return j;
  throw std::logic_error("relation frame has no origin");
}

/// Accepts the witness when the original relation fails at t by more than
/// half the transported margin.
inline void conclude(WitnessReport& rep, const Relation& original, const Relation& frame, double t, double margin) {
  const double top = margin * frame.norm_factor / original.norm_factor;
  const double res = original.residual(t);
  const double scale = original.scale(t);
  rep.witness_time = t;
  rep.margin = top;
  rep.details["witness"] = {{"t", t}, {"branch_margin", margin}, {"residual", res}, {"scale", scale}};
  if (scale > kScaleFloor && top > 1e-9 * scale && res > top / 2 && std::isfinite(res)) {
    rep.verdict = Verdict::RefutedDependence;
  } else {
    rep.verdict = Verdict::Inconclusive;
    rep.log({{"step", "witness rejected"}, {"reason", "residual or margin below threshold"}});
  }
}

inline void no_window(WitnessReport& rep, const std::string& what) {
  rep.verdict = Verdict::Inconclusive;
  rep.log({{"step", "no witness"}, {"branch", what}});
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Case 1 style refutation: all non-origin terms share a sign.

enum class RefuteMode { Real, ImagNegative, ImagPositive, Auto };

inline std::string to_string(RefuteMode m) {
  switch (m) {
    case RefuteMode::Real: return "real";
    case RefuteMode::ImagNegative: return "imag_negative";
    case RefuteMode::ImagPositive: return "imag_positive";
    case RefuteMode::Auto: return "auto";
  }
  return "?";
}

namespace detail {

struct NormalTerms {
  std::vector<std::size_t> idx;  // non-origin indices
  std::vector<Complex> c;        // f(t) = sum c_k e^{..} f(t - tau_k)
  std::vector<double> theta;     // c_k = |c_k| e^{2 pi i theta_k}
};

inline NormalTerms normal_terms(const Relation& frame, std::size_t origin) {
  NormalTerms pt;
  for (std::size_t k = 0; k < frame.size(); ++k) {
    if (k == origin) continue;
    const Complex ck = -frame.d[k] / frame.d[origin];
    if (ck == Complex(0)) throw std::invalid_argument("zero coefficients must be removed before refutation");
    pt.idx.push_back(k);
    pt.c.push_back(ck);
    pt.theta.push_back(phase_of(ck));
  }
  return pt;
}

/// sum_k |c_k| trig(2 pi (omega_k t + theta_k)) f(t - tau_k).
inline double trig_sum(const Relation& frame, const NormalTerms& pt, double t, Trig trig) {
  double s = 0;
  for (std::size_t i = 0; i < pt.idx.size(); ++i) {
    const auto& p = frame.points[pt.idx[i]];
    const double ph = kTwoPi * (p.omega * t + pt.theta[i]);
    s += std::abs(pt.c[i]) * (trig == Trig::Cos ? std::cos(ph) : std::sin(ph)) * frame.f(t - p.tau);
  }
  return s;
}

inline double mode_margin(const Relation& frame, const NormalTerms& pt, double t, RefuteMode mode) {
  switch (mode) {
    case RefuteMode::Real: return frame.f(t) - trig_sum(frame, pt, t, Trig::Cos);
    case RefuteMode::ImagNegative: return -trig_sum(frame, pt, t, Trig::Sin);
    case RefuteMode::ImagPositive: return trig_sum(frame, pt, t, Trig::Sin);
    case RefuteMode::Auto: break;
  }
  throw std::logic_error("mode_margin needs a concrete mode");
}

inline std::vector<SignFactor> mode_factors(const Relation& frame, const NormalTerms& pt, RefuteMode mode) {
  std::vector<SignFactor> fs;
  for (std::size_t i = 0; i < pt.idx.size(); ++i) {
    const double w = frame.points[pt.idx[i]].omega;
    if (mode == RefuteMode::Real) fs.push_back({w, pt.theta[i], Trig::Cos, Sign::NonPositive});
    if (mode == RefuteMode::ImagNegative) fs.push_back({w, pt.theta[i], Trig::Sin, Sign::Negative});
    if (mode == RefuteMode::ImagPositive) fs.push_back({w, pt.theta[i], Trig::Sin, Sign::Positive});
  }
  return fs;
}

inline bool try_window(WitnessReport& rep, const Relation& original, const Relation& frame, const NormalTerms& pt,
                       RefuteMode mode, double slack, const VerifyOptions& opts) {
  const double start = search_start(frame, opts);
  auto w = first_sign_window(mode_factors(frame, pt, mode), start, slack, opts.max_span);
  rep.log({{"step", "sign window"}, {"mode", to_string(mode)}, {"slack", slack}, {"start", start},
           {"window", w ? json{w->lo, w->hi} : json(nullptr)}});
  if (!w) return false;
  const double t = w->mid();
  conclude(rep, original, frame, t, mode_margin(frame, pt, t, mode));
  return rep.refuted();
}

inline bool extremal_123(const Relation& frame, const NormalTerms& pt) {
  if (pt.idx.size() != 3) return false;
  std::vector<std::size_t> o{0, 1, 2};
  std::sort(o.begin(), o.end(), [&](auto a, auto b) { return frame.points[pt.idx[a]].omega < frame.points[pt.idx[b]].omega; });
  const auto& p0 = frame.points[pt.idx[o[0]]];
  const auto& p1 = frame.points[pt.idx[o[1]]];
  const auto& p2 = frame.points[pt.idx[o[2]]];
  if (!(0 < p0.omega && p0.omega < p1.omega && p1.omega < p2.omega)) return false;
  if (frame.points.exact())
    return is_proportional_123(*frame.points.basis, *p0.omega_exact, *p1.omega_exact, *p2.omega_exact);
  return is_proportional_123(p0.omega, p1.omega, p2.omega);
}

inline void refute_in_frame(WitnessReport& rep, const Relation& original, const Relation& frame, RefuteMode mode,
                            const VerifyOptions& opts) {
  const std::size_t origin = origin_index(frame);
  const NormalTerms pt = normal_terms(frame, origin);
  json thetas = json::array();
  for (double th : pt.theta) thetas.push_back(th);
  rep.details["theta"] = thetas;

  if (mode != RefuteMode::Auto) {
    if (!try_window(rep, original, frame, pt, mode, 0.0, opts)) {
      if (!rep.witness_time) no_window(rep, to_string(mode));
    }
    return;
  }
  if (extremal_123(frame, pt)) {
    std::vector<std::size_t> o{0, 1, 2};
    std::sort(o.begin(), o.end(), [&](auto a, auto b) { return frame.points[pt.idx[a]].omega < frame.points[pt.idx[b]].omega; });
    RunnerInstance inst;
    for (auto i : o) {
      inst.velocities.push_back(frame.points[pt.idx[i]].omega);
      inst.starts.push_back(pt.theta[i]);
    }
    if (frame.points.exact()) {
      ExactFrequencies ex{*frame.points.basis, {}};
      for (auto i : o) ex.values.push_back(*frame.points[pt.idx[i]].omega_exact);
      inst.exact = ex;
    }
    const auto sv = select_spectator(inst, search_start(frame, opts));
    const RefuteMode m = sv.spectator == Spectator::One ? RefuteMode::Real
                         : sv.spectator == Spectator::I ? RefuteMode::ImagNegative
                                                        : RefuteMode::ImagPositive;
    rep.log({{"step", "spectator"}, {"spectator", to_string(sv.spectator)},
             {"interval", {sv.witness_interval.lo, sv.witness_interval.hi}}, {"mode", to_string(m)}});
    const double t = sv.witness_interval.mid();
    conclude(rep, original, frame, t, mode_margin(frame, pt, t, m));
    return;
  }
  if (try_window(rep, original, frame, pt, RefuteMode::Real, opts.generic_slack, opts)) return;
  if (try_window(rep, original, frame, pt, RefuteMode::Real, 0.0, opts)) return;
  if (!rep.witness_time) no_window(rep, "real");
}

}  // namespace detail

/// `lambda[0]` must be the origin; `c` holds the coefficients of
/// f(t) = sum_k c_k e^{2 pi i omega_k t} f(t - tau_k) for the other points.
inline WitnessReport refute_dependence(const FunctionModel& f, const PointSet& lambda, const std::vector<Complex>& c,
                                       RefuteMode mode = RefuteMode::Auto, const VerifyOptions& opts = {}) {
  if (lambda.size() != c.size() + 1) throw std::invalid_argument("one coefficient per non-origin point is required");
  if (lambda.size() == 0 || lambda[0].tau != 0 || lambda[0].omega != 0)
    throw std::invalid_argument("the first point must be the origin");
  for (const auto& z : c)
    if (z == Complex(0)) throw std::invalid_argument("zero coefficients must be removed before refutation");
  Relation rel{f, lambda, {Complex(1)}};
  for (const auto& z : c) rel.d.push_back(-z);
  rel.validate();
  WitnessReport rep;
  rep.branch = "refute." + to_string(mode);
  detail::refute_in_frame(rep, rel, rel, mode, opts);
  return rep;
}

// ---------------------------------------------------------------------------
// Two equal frequencies: the two-runner argument.

namespace detail {

inline WitnessReport half_line_shortcut(const Relation& rel) {
  WitnessReport rep;
  rep.branch = "half_line";
  const double edge = *rel.f.half_line_left_edge();
  rep.log({{"step", "half-line support"}, {"edge", edge},
           {"note", "a square-integrable f supported on a half-line generates independent systems"}});
  double tmin = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < rel.size(); ++j)
    if (rel.d[j] != Complex(0)) tmin = std::min(tmin, rel.points[j].tau);
  double gap = 1.0;
  for (std::size_t j = 0; j < rel.size(); ++j)
    if (rel.d[j] != Complex(0) && rel.points[j].tau > tmin) gap = std::min(gap, rel.points[j].tau - tmin);
  double best_t = edge + tmin, best = 0;
  for (int i = 1; i <= 256; ++i) {
    const double t = edge + tmin + gap * i / 257.0;
    const double r = rel.residual(t);
    if (r > best) best = r, best_t = t;
  }
  rep.details["shortcut"] = true;
  conclude(rep, rel, rel, best_t, best);
  return rep;
}

inline void case2_in_frame(WitnessReport& rep, const Relation& original, Relation frame, std::size_t a, std::size_t b,
                           const VerifyOptions& opts) {
  frame = reorigin(frame, a);
  rep.log({{"step", "reorigin"}, {"index", a}});
  if (frame.d[b].imag() < 0) {
    frame = conjugate(frame);
    rep.log({{"step", "conjugate"}, {"reason", "Im c1 < 0"}});
  }
  const Complex c1 = frame.d[b];
  std::vector<std::size_t> others;
  std::vector<Complex> c;
  std::vector<double> theta;
  for (std::size_t k = 0; k < frame.size(); ++k) {
    if (k == a || k == b) continue;
    others.push_back(k);
    c.push_back(-frame.d[k]);
    if (c.back() == Complex(0)) throw std::invalid_argument("zero coefficients must be removed before refutation");
    theta.push_back(phase_of(c.back()));
  }
  auto margin_at = [&](double t) {
    double m = c1.imag() * frame.f(t - frame.points[b].tau);
    for (std::size_t i = 0; i < others.size(); ++i) {
      const auto& p = frame.points[others[i]];
      m -= std::abs(c[i]) * std::sin(kTwoPi * (p.omega * t + theta[i])) * frame.f(t - p.tau);
    }
    return m;
  };
  rep.details["c1"] = {c1.real(), c1.imag()};
  const double start = search_start(frame, opts);

  if (others.size() == 2) {
    const double w2 = frame.points[others[0]].omega, w3 = frame.points[others[1]].omega;
    if (w2 != 0 && w3 != 0 && std::abs(w2) != std::abs(w3)) {
      // sin(2 pi x) <= -1/2 iff x is at distance >= 1/3 from the spectator at 1/4.
      RunnerInstance inst;
      for (std::size_t i = 0; i < 2; ++i) {
        const double w = frame.points[others[i]].omega;
        inst.velocities.push_back(std::abs(w));
        inst.starts.push_back(w > 0 ? theta[i] - 0.25 : 0.25 - theta[i]);
      }
      auto hit = find_lonely_time(inst, 1.0 / 3.0 - 1e-12, start, opts.scan_budget);
      rep.log({{"step", "two runners"}, {"velocities", inst.velocities}, {"starts", inst.starts},
               {"t", hit ? json(hit->t) : json(nullptr)}});
      if (hit) {
        conclude(rep, original, frame, hit->t, margin_at(hit->t));
        if (rep.refuted()) return;
      }
    }
  }
  std::vector<SignFactor> fs;
  for (std::size_t i = 0; i < others.size(); ++i)
    fs.push_back({frame.points[others[i]].omega, theta[i], Trig::Sin, Sign::Negative});
  auto w = first_sign_window(fs, start, 0.0, opts.max_span);
  rep.log({{"step", "sign window"}, {"mode", "imag_negative"}, {"window", w ? json{w->lo, w->hi} : json(nullptr)}});
  if (w) {
    conclude(rep, original, frame, w->mid(), margin_at(w->mid()));
    return;
  }
  no_window(rep, "case2");
}

/// Indices of two points with equal frequency, preferring the lowest pair.
inline std::pair<std::size_t, std::size_t> equal_pair(const PointSet& ps) {
  auto o = omega_order(ps);
  for (std::size_t i = 0; i + 1 < o.size(); ++i)
    if (same_omega(ps, o[i], o[i + 1])) return {o[i], o[i + 1]};
  throw std::invalid_argument("no two points share a frequency");
}

}  // namespace detail

/// Relation with two points on one horizontal line and the remaining points
/// on distinct other lines; `c` as in refute_dependence.
inline WitnessReport case2_claim_refute(const FunctionModel& f, const PointSet& lambda, const std::vector<Complex>& c,
                                        const VerifyOptions& opts = {}) {
  if (lambda.size() != c.size() + 1) throw std::invalid_argument("one coefficient per non-origin point is required");
  Relation rel{f, lambda, {Complex(1)}};
  for (const auto& z : c) rel.d.push_back(-z);
  rel.validate();
  if (f.half_line_left_edge() && f.is_square_integrable()) return detail::half_line_shortcut(rel);
  WitnessReport rep;
  rep.branch = "case2";
  auto [a, b] = detail::equal_pair(lambda);
  detail::case2_in_frame(rep, rel, rel, a, b, opts);
  return rep;
}

// ---------------------------------------------------------------------------
// Three equal frequencies.

struct Case3Reduction {
  Relation frame;  // re-origined at the first point of the equal triple
  std::array<std::size_t, 2> pair{};  // the other two points of the triple
  std::size_t top = 0;                // the point on the other line
  double c1 = 0, c2 = 0;              // imaginary parts of the triple's coefficients
  double c3_abs = 0, theta3 = 0, omega3 = 0;
  PointSet lambda_prime;              // (tau1, 0), (tau2, 0), (tau3, omega3), (tau3, -omega3)
  std::vector<Complex> coefficients_prime;
};

inline Case3Reduction case3_reduce(const Relation& rel) {
  if (rel.size() != 4) throw std::invalid_argument("case3_reduce needs four points");
  auto o = omega_order(rel.points);
  std::size_t first = 0;
  if (same_omega(rel.points, o[0], o[1]) && same_omega(rel.points, o[1], o[2]))
    first = 0;
  else if (same_omega(rel.points, o[1], o[2]) && same_omega(rel.points, o[2], o[3]))
    first = 1;
  else
    throw std::invalid_argument("configuration has no three points on one horizontal line");
  Case3Reduction r;
  const std::size_t a = o[first];
  r.pair = {o[first + 1], o[first + 2]};
  r.top = first == 0 ? o[3] : o[0];
  r.frame = reorigin(rel, a);
  r.c1 = r.frame.d[r.pair[0]].imag();
  r.c2 = r.frame.d[r.pair[1]].imag();
  const Complex c3 = -r.frame.d[r.top];
  r.c3_abs = std::abs(c3);
  r.theta3 = std::arg(c3) / (2.0 * std::numbers::pi);
  r.omega3 = r.frame.points[r.top].omega;
  const double tau3 = r.frame.points[r.top].tau;
  r.lambda_prime = make_points({{r.frame.points[r.pair[0]].tau, 0.0},
                                {r.frame.points[r.pair[1]].tau, 0.0},
                                {tau3, r.omega3},
                                {tau3, -r.omega3}});
  const Complex two_i(0, 2);
  r.coefficients_prime = {Complex(r.c1), Complex(r.c2), r.c3_abs * std::polar(1.0, 2 * std::numbers::pi * r.theta3) / two_i,
                          -r.c3_abs * std::polar(1.0, -2 * std::numbers::pi * r.theta3) / two_i};
  return r;
}

namespace detail {

inline void case3_in_frame(WitnessReport& rep, const Relation& original, const Case3Reduction& red,
                           const VerifyOptions& opts) {
  const Relation& fr = red.frame;
  const double tau1 = fr.points[red.pair[0]].tau, tau2 = fr.points[red.pair[1]].tau;
  const double tau3 = fr.points[red.top].tau;
  auto lhs = [&](double t) { return red.c1 * fr.f(t - tau1) + red.c2 * fr.f(t - tau2); };
  auto sin3 = [&](double t) { return std::sin(kTwoPi * (red.omega3 * t + red.theta3)); };
  auto rhs = [&](double t) { return red.c3_abs * sin3(t) * fr.f(t - tau3); };
  rep.log({{"step", "reorigin"}, {"index", origin_index(fr)}});
  rep.details["reduction"] = {{"c1_prime", red.c1}, {"c2_prime", red.c2}, {"c3_abs", red.c3_abs},
                              {"theta3", red.theta3}, {"omega3", red.omega3}};
  const double start = search_start(fr, opts);

  if (red.c1 == 0 && red.c2 == 0) {
    // The left side vanishes while the right side oscillates: take a peak.
    const double x = red.omega3 * start + red.theta3 - 0.25;
    const double m = red.omega3 > 0 ? std::ceil(x) : std::floor(x);
    const double t = (0.25 + m - red.theta3) / red.omega3;
    rep.log({{"step", "analytic"}, {"note", "imaginary parts of the triple vanish"}, {"t", t}});
    conclude(rep, original, fr, t, red.c3_abs * fr.f(t - tau3));
    return;
  }
  if ((red.c1 >= 0 && red.c2 >= 0) || (red.c1 <= 0 && red.c2 <= 0)) {
    const bool lhs_positive = red.c1 >= 0 && red.c2 >= 0;
    const Sign want = lhs_positive ? Sign::Negative : Sign::Positive;
    auto w = first_sign_window({{red.omega3, red.theta3, Trig::Sin, want}}, start, 0.0, opts.max_span);
    rep.log({{"step", "sign window"}, {"mode", lhs_positive ? "imag_negative" : "imag_positive"},
             {"window", w ? json{w->lo, w->hi} : json(nullptr)}});
    if (!w) return no_window(rep, "case3");
    const double t = w->mid();
    conclude(rep, original, fr, t, lhs_positive ? lhs(t) - rhs(t) : rhs(t) - lhs(t));
    return;
  }
  // Mixed signs: the sign of the left side depends on f; inspect windows of
  // both signs until the sides disagree.
  double lo = start;
  for (int round = 0; round < 64; ++round) {
    const double span = 64.0;
    for (Sign s : {Sign::Negative, Sign::Positive}) {
      for (const auto& w : sign_window({{red.omega3, red.theta3, Trig::Sin, s}}, lo, span)) {
        const double t = w.mid();
        const double l = lhs(t), r = rhs(t);
        if ((l > 0 && r < 0) || (l < 0 && r > 0)) {
          rep.log({{"step", "model sign check"}, {"t", t}, {"lhs", l}, {"rhs", r}});
          conclude(rep, original, fr, t, std::abs(l - r));
          if (rep.refuted()) return;
        }
      }
    }
    lo += span;
  }
  no_window(rep, "case3.mixed");
}

// ---------------------------------------------------------------------------

/// Largest residual on a uniform grid of [lo, hi].
inline std::pair<double, double> residual_scan(const Relation& rel, double lo, double hi, std::size_t n) {
  double best_t = lo, best = -1;
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
    const double r = rel.residual(t);
    const double s = rel.scale(t);
    const double rel_r = s > kScaleFloor ? r / s : 0.0;
    if (rel_r > best) best = rel_r, best_t = t;
  }
  return {best_t, best};
}

inline void case4_in_frame(WitnessReport& rep, const Relation& original, const Relation& frame, const VerifyOptions& opts) {
  std::vector<double> taus;
  for (const auto& p : frame.points.points) taus.push_back(p.tau);
  auto P = case4_trig_poly_check(frame.d, taus);
  rep.details["trig_poly"] = {{"nonvanishing", P.is_nonvanishing}, {"max_modulus", P.max_modulus},
                              {"argmax", P.max_modulus_at}};
  if (!P.is_nonvanishing) rep.log({{"step", "trig poly"}, {"note", "coefficient recovery failure"}});
  const double start = search_start(frame, opts);
  auto [t, rel_res] = residual_scan(frame, start, start + 64.0, 16384);
  rep.log({{"step", "residual scan"}, {"range", {start, start + 64.0}}, {"t", t}, {"relative_residual", rel_res}});
  if (rel_res > 1e-9) {
    conclude(rep, original, frame, t, frame.residual(t));
    return;
  }
  no_window(rep, "case4");
}

inline void case5_in_frame(WitnessReport& rep, const Relation& original, Relation frame, const Classification& cls,
                           const VerifyOptions& opts) {
  // Bottom pair: origin and (tau1 > 0, 0). Top pair sorted so tau3 > tau2.
  const std::size_t o0 = cls.order[0], o1 = cls.order[1];
  std::size_t o2 = cls.order[2], o3 = cls.order[3];
  if (frame.points[o2].tau > frame.points[o3].tau) std::swap(o2, o3);
  if (frame.points[o0].tau != 0 || frame.points[o0].omega != 0) throw std::logic_error("case 5 frame not normalized");
  if (frame.d[o1].imag() < 0) {
    frame = conjugate(frame);
    rep.log({{"step", "conjugate"}, {"reason", "Im c1 < 0"}});
  }
  const Complex c1 = frame.d[o1] / frame.d[o0];
  const Complex c2 = -frame.d[o2] / frame.d[o0], c3 = -frame.d[o3] / frame.d[o0];
  const double w2 = frame.points[o2].omega;
  const double tau1 = frame.points[o1].tau, tau2 = frame.points[o2].tau, tau3 = frame.points[o3].tau;
  const double th1 = phase_of(c1), th2 = phase_of(c2), th3 = phase_of(c3);
  const double start = search_start(frame, opts);
  auto f = [&](double t) { return frame.f(t); };
  rep.details["case5"] = {{"c1", {c1.real(), c1.imag()}}, {"theta2", th2}, {"theta3", th3}, {"tau1", tau1},
                          {"tau", tau3 - tau2}};

  auto w = first_sign_window({{w2, th2, Trig::Sin, Sign::Negative}, {w2, th3, Trig::Sin, Sign::Negative}}, start, 1e-9,
                             opts.max_span);
  rep.log({{"step", "sign window"}, {"mode", "imag_negative"}, {"window", w ? json{w->lo, w->hi} : json(nullptr)}});
  if (w) {
    const double t = w->mid();
    const double m = c1.imag() * f(t - tau1) - std::abs(c2) * std::sin(kTwoPi * (w2 * t + th2)) * f(t - tau2) -
                     std::abs(c3) * std::sin(kTwoPi * (w2 * t + th3)) * f(t - tau3);
    conclude(rep, original, frame, t, m);
    return;
  }
  rep.log({{"step", "half-integer phase gap"}, {"theta2_minus_theta3", th2 - th3}});

  if (c1.imag() > 1e-12 * std::abs(c1)) {
    auto w1 = first_sign_window({{w2, th2, Trig::Sin, Sign::Negative}, {w2, th2 - th1, Trig::Sin, Sign::Negative}},
                                start, 0.0, opts.max_span);
    rep.log({{"step", "rotated sign window"}, {"window", w1 ? json{w1->lo, w1->hi} : json(nullptr)}});
    if (w1) {
      const double t = w1->mid();
      const double ph = kTwoPi * (w2 * t + th2);
      const double m = -std::sin(ph) * f(t) - std::abs(c1) * std::sin(ph - kTwoPi * th1) * f(t - tau1) -
                       std::abs(c3) * std::sin(kTwoPi * (th3 - th2)) * f(t - tau3);
      conclude(rep, original, frame, t, m);
      return;
    }
    return no_window(rep, "case5.rotated");
  }

  // Im c1 = 0: the relation splits into f(t) = C f(t - tau) and f(t) = c f(t - tau1).
  const double big_c = std::abs(c3) / std::abs(c2), small_c = -c1.real();
  for (int m = 0; m < 4096; ++m) {
    const double t = (0.25 + 0.5 * m + std::ceil(w2 * start + th2) - th2) / w2;
    if (t < start) continue;
    const double im = frame.sum(t).imag();
    if (frame.scale(t) < kScaleFloor) break;
    if (std::abs(im) > 1e-9 * frame.scale(t)) {
      rep.log({{"step", "functional equation"}, {"equation", "f(t) = C f(t - tau)"}, {"fails_at", t}});
      conclude(rep, original, frame, t, std::abs(im));
      return;
    }
  }
  for (int i = 0; i < 4096; ++i) {
    const double t = start + i / 64.0;
    const double re = f(t) + c1.real() * f(t - tau1);
    if (frame.scale(t) < kScaleFloor) break;
    if (std::abs(re) > 1e-9 * frame.scale(t)) {
      rep.log({{"step", "functional equation"}, {"equation", "f(t) = c f(t - tau1)"}, {"fails_at", t}});
      conclude(rep, original, frame, t, std::abs(frame.sum(t).real()));
      return;
    }
  }
  if (small_c > 0) {
    auto feas = case5_feasibility(small_c, big_c, tau3 - tau2, tau1);
    json fj = {{"feasible", feas.feasible}, {"reason", feas.reason}, {"exponent_gap", feas.exponent_gap}};
    if (feas.C0) fj["C0"] = *feas.C0;
    rep.details["feasibility"] = fj;
    if (feas.feasible && cls.tag.subcase == Subcase::Case5Irrational) {
      auto k = khinchin_average_check(*feas.C0, tau3 - tau2, tau1, start, 100000);
      rep.details["khinchin"] = {{"average", k.empirical_average}, {"integral", k.integral}, {"deviation", k.deviation}};
    }
    if (feas.feasible && cls.tau_ratio) {
      const double tau_p = (tau3 - tau2) / static_cast<double>(cls.tau_ratio->first);
      const double cp = std::pow(*feas.C0, tau_p);
      double tail = 0, total = 0;
      for (int i = -4096; i <= 4096; ++i) {
        const double t = start + i / 64.0;
        const double g = f(t) - cp * f(t - tau_p);
        total += g * g;
        if (t >= start) tail += g * g;
      }
      rep.details["half_line_g"] = {{"tau_prime", tau_p}, {"c_prime", cp},
                                    {"tail_fraction", total > 0 ? tail / total : 0.0},
                                    {"approximately_half_line", total > 0 && tail <= 1e-8 * total}};
    }
  }
  auto [t, rel_res] = residual_scan(frame, opts.window_start - 32.0, opts.window_start + 32.0, 16384);
  rep.log({{"step", "boundary residual scan"}, {"t", t}, {"relative_residual", rel_res}});
  if (rel_res > 1e-9) {
    conclude(rep, original, frame, t, frame.residual(t));
    return;
  }
  no_window(rep, "case5");
}

inline void attach_certificate(WitnessReport& rep, const Relation& rel, const VerifyOptions& opts) {
  if (rep.refuted() || !opts.attach_certificate) return;
  auto s = independence_score(rel.f, rel.points, opts.gram_window, opts.gram_samples);
  GramCertificate g{s.min_eigenvalue, s.trace, s.relative_min(), s.dependent(), s.residual, opts.gram_window,
                    opts.gram_samples, {}};
  for (Eigen::Index i = 0; i < s.min_vector.size(); ++i) g.min_vector.push_back(s.min_vector(i));
  rep.certificate = g;
  if (g.dependent) rep.verdict = Verdict::NumericallyDependent;
}

inline void require_nonzero(const Relation& rel) {
  for (const auto& z : rel.d)
    if (z == Complex(0)) throw std::invalid_argument("zero coefficients must be removed before verification");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Frequency sets of affine dimension >= N - 1.

namespace detail {

inline std::optional<ExactFrequencies> exact_frequencies(const Relation& r, const std::vector<std::size_t>& idx) {
  if (!r.points.exact()) return std::nullopt;
  ExactFrequencies ex{*r.points.basis, {}};
  for (auto k : idx) ex.values.push_back(*r.points[k].omega_exact);
  return ex;
}

inline ApproxTask kronecker_task(const Relation& r, const std::vector<std::size_t>& idx, std::vector<double> targets,
                                 double eps, double start, const VerifyOptions& opts) {
  ApproxTask task;
  for (auto k : idx) task.lambdas.push_back(r.points[k].omega);
  task.exact = exact_frequencies(r, idx);
  task.targets = std::move(targets);
  task.epsilon = eps;
  task.window_start = start;
  task.scan_budget = opts.scan_budget;
  return task;
}

/// sum_k Im(c_k e^{2 pi i omega_k t}) f(t - tau_k).
inline double imag_sum(const Relation& frame, const std::vector<std::size_t>& idx, const std::vector<Complex>& c, double t) {
  double s = 0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const auto& p = frame.points[idx[i]];
    s += (c[i] * std::polar(1.0, kTwoPi * p.omega * t)).imag() * frame.f(t - p.tau);
  }
  return s;
}

inline void reduction_branch(WitnessReport& rep, const Relation& original, Relation frame, std::size_t a, std::size_t b,
                             const VerifyOptions& opts) {
  frame = reorigin(frame, a);
  rep.log({{"step", "reorigin"}, {"index", a}});
  if (frame.d[b].imag() > 0) {
    frame = conjugate(frame);
    rep.log({{"step", "conjugate"}, {"reason", "Im c1 > 0"}});
  }
  const Complex c1 = frame.d[b];
  std::vector<std::size_t> idx;
  std::vector<Complex> c;
  std::vector<double> targets;
  for (std::size_t k = 0; k < frame.size(); ++k) {
    if (k == a || k == b) continue;
    idx.push_back(k);
    c.push_back(-frame.d[k]);
    targets.push_back(0.25 - phase_of(c.back()));
  }
  const double start = search_start(frame, opts);
  auto task = kronecker_task(frame, idx, targets, 0.125, start, opts);
  rep.heuristic = rep.heuristic || !task.exact;
  rep.details["targets"] = targets;
  std::optional<ApproxWitness> w;
  try {
    w = kronecker_witness(task);
  } catch (const BadSequence& e) {
    rep.log({{"step", "bad sequence"}, {"relation", *e.verdict().violating_relation}});
    return no_window(rep, "theorem_1_4.reduction");
  }
  rep.log({{"step", "kronecker"}, {"epsilon", 0.125}, {"t", w ? json(w->t) : json(nullptr)}});
  if (!w) return no_window(rep, "theorem_1_4.reduction");
  const double t = w->t;
  conclude(rep, original, frame, t, imag_sum(frame, idx, c, t) - c1.imag() * frame.f(t - frame.points[b].tau));
}

}  // namespace detail

/// `d` holds the full coefficient vector of the relation, aligned with `lambda`.
inline WitnessReport verify_theorem_1_4(const FunctionModel& f, const PointSet& lambda, const std::vector<Complex>& d,
                                        const VerifyOptions& opts = {}) {
  Relation rel{f, lambda, d};
  rel.validate();
  detail::require_nonzero(rel);
  if (!f.is_ultimately_positive()) throw std::invalid_argument("f must be ultimately positive");
  WitnessReport rep;
  rep.branch = "theorem_1_4";
  const auto norm = normalize_origin(f, lambda);
  const std::size_t o = norm.origin_index;
  Relation frame = reorigin(rel, o);
  rep.log({{"step", "reorigin"}, {"index", o}});

  const std::size_t N = lambda.size() - 1;
  const std::size_t dim = omega_affine_dimension(frame.points);
  rep.details["affine_dimension"] = dim;
  rep.heuristic = !frame.points.exact();
  if (N >= 1 && dim + 1 < N) throw PreconditionNotMet("affine dimension of the frequencies is below N - 1");

  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < frame.size(); ++k)
    if (k != o) idx.push_back(k);
  std::vector<IntVector> relations;
  if (frame.points.exact()) {
    std::vector<ExactReal> w;
    for (auto k : idx) w.push_back(*frame.points[k].omega_exact);
    relations = relation_lattice(w).basis;
  } else {
    std::vector<double> w;
    for (auto k : idx) w.push_back(frame.points[k].omega);
    relations = float_relation_candidates(w);
  }
  rep.details["relations"] = relations;
  const double start = detail::search_start(frame, opts);

  std::vector<Complex> c;
  for (auto k : idx) c.push_back(-frame.d[k]);

  if (relations.empty()) {
    rep.branch += ".independent";
    std::vector<double> targets;
    for (const auto& ck : c) targets.push_back(0.5 - detail::phase_of(ck));
    auto task = detail::kronecker_task(frame, idx, targets, 0.125, start, opts);
    auto w = kronecker_witness(task);
    rep.log({{"step", "kronecker"}, {"epsilon", 0.125}, {"t", w ? json(w->t) : json(nullptr)}});
    if (!w) {
      detail::no_window(rep, rep.branch);
    } else {
      double m = frame.f(w->t);
      for (std::size_t i = 0; i < idx.size(); ++i) {
        const auto& p = frame.points[idx[i]];
        m -= (c[i] * std::polar(1.0, detail::kTwoPi * p.omega * w->t)).real() * frame.f(w->t - p.tau);
      }
      detail::conclude(rep, rel, frame, w->t, m);
    }
    return rep;
  }
  if (relations.size() > 1) throw PreconditionNotMet("more than one independent frequency relation");

  const IntVector& p = relations.front();
  std::int64_t S = 0;
  for (auto v : p) S += std::abs(v);
  if (S >= 3) {
    rep.branch += ".perturbation";
    std::vector<double> theta;
    long double alpha = 0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      theta.push_back(0.25 - detail::phase_of(c[i]));
      alpha += static_cast<long double>(p[i]) * theta.back();
    }
    auto pert = perturbation_phis(p, static_cast<double>(alpha));
    double phimax = 0;
    for (double phi : pert.phis) phimax = std::max(phimax, std::abs(phi));
    const double eps = (0.25 - phimax) / 2.0;
    std::vector<double> targets;
    for (std::size_t i = 0; i < idx.size(); ++i) targets.push_back(theta[i] + pert.phis[i]);
    rep.details["perturbation"] = {{"p", p}, {"alpha", static_cast<double>(alpha)}, {"phis", pert.phis},
                                   {"alpha_residual", pert.alpha_residual}, {"epsilon", eps}};
    auto task = detail::kronecker_task(frame, idx, targets, eps, start, opts);
    std::optional<ApproxWitness> w;
    try {
      w = kronecker_witness(task);
    } catch (const BadSequence& e) {
      rep.log({{"step", "bad sequence"}, {"defect", *e.verdict().defect}});
      detail::no_window(rep, rep.branch);
      return rep;
    }
    rep.log({{"step", "kronecker"}, {"epsilon", eps}, {"t", w ? json(w->t) : json(nullptr)}});
    if (!w) {
      detail::no_window(rep, rep.branch);
      return rep;
    }
    detail::conclude(rep, rel, frame, w->t, detail::imag_sum(frame, idx, c, w->t));
    return rep;
  }

  rep.branch += ".reduction";
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] != 0) support.push_back(idx[i]);
  const std::size_t a = S == 1 ? o : support[0];
  const std::size_t b = S == 1 ? support[0] : support[1];
  detail::reduction_branch(rep, rel, frame, a, b, opts);
  return rep;
}

// ---------------------------------------------------------------------------

/// Full four-point pipeline; `d` aligned with `lambda`.
inline WitnessReport verify_4pt(const FunctionModel& f, const PointSet& lambda, const std::vector<Complex>& d,
                                const VerifyOptions& opts = {}) {
  if (lambda.size() != 4) throw std::invalid_argument("verify_4pt needs exactly four points");
  Relation rel{f, lambda, d};
  rel.validate();
  detail::require_nonzero(rel);
  if (f.half_line_left_edge() && f.is_square_integrable()) return detail::half_line_shortcut(rel);
  if (!f.is_ultimately_positive()) throw std::invalid_argument("f must be ultimately positive");

  const auto norm = normalize_origin(f, lambda);
  Relation frame = reorigin(rel, norm.origin_index);
  const auto cls = classify_4pt_detailed(frame.points);
  WitnessReport rep;
  rep.case_tag = cls.tag;
  rep.heuristic = !frame.points.exact();
  rep.log({{"step", "reorigin"}, {"index", norm.origin_index}});

  switch (cls.tag.tag) {
    case CaseKind::Case1:
      if (cls.tag.subcase == Subcase::Case1AffineDimHigh) {
        auto sub = verify_theorem_1_4(f, lambda, d, opts);
        sub.case_tag = cls.tag;
        sub.branch = "case1.affine_dim_high." + sub.branch;
        rep = std::move(sub);
      } else {
        rep.branch = cls.tag.subcase == Subcase::Case1Extremal123 ? "case1.extremal_123" : "case1.generic";
        detail::refute_in_frame(rep, rel, frame, RefuteMode::Auto, opts);
      }
      break;
    case CaseKind::Case2: {
      rep.branch = "case2";
      auto [a, b] = detail::equal_pair(frame.points);
      detail::case2_in_frame(rep, rel, frame, a, b, opts);
      break;
    }
    case CaseKind::Case3:
      rep.branch = "case3";
      detail::case3_in_frame(rep, rel, case3_reduce(frame), opts);
      break;
    case CaseKind::Case4:
      rep.branch = "case4";
      detail::case4_in_frame(rep, rel, frame, opts);
      break;
    case CaseKind::Case5:
      rep.branch = "case5";
      detail::case5_in_frame(rep, rel, frame, cls, opts);
      break;
  }
  detail::attach_certificate(rep, rel, opts);
  return rep;
}

// ---------------------------------------------------------------------------
// Router used by the command line tool.

inline GramCertificate gram_certificate(const FunctionModel& f, const PointSet& lambda, const VerifyOptions& opts = {}) {
  auto s = independence_score(f, lambda, opts.gram_window, opts.gram_samples);
  GramCertificate g{s.min_eigenvalue, s.trace, s.relative_min(), s.dependent(), s.residual, opts.gram_window,
                    opts.gram_samples, {}};
  for (Eigen::Index i = 0; i < s.min_vector.size(); ++i) g.min_vector.push_back(s.min_vector(i));
  return g;
}

/// Verifies a relation of any size. Without coefficients, the Gram matrix's
/// smallest eigenvector is used as the candidate relation.
inline WitnessReport verify(const FunctionModel& f, const PointSet& lambda, std::optional<std::vector<Complex>> coeffs,
                            const VerifyOptions& opts = {}) {
  lambda.validate();
  if (lambda.size() == 0) throw std::invalid_argument("empty point set");
  std::optional<GramCertificate> cert;
  if (!coeffs) {
    cert = gram_certificate(f, lambda, opts);
    coeffs = cert->min_vector;
  }
  if (coeffs->size() != lambda.size()) throw std::invalid_argument("one coefficient per point is required");
  double cmax = 0;
  for (const auto& z : *coeffs) cmax = std::max(cmax, std::abs(z));
  if (cmax == 0) throw std::invalid_argument("all coefficients are zero");

  PointSet kept{{}, lambda.basis};
  std::vector<Complex> d;
  for (std::size_t j = 0; j < lambda.size(); ++j) {
    if (std::abs((*coeffs)[j]) <= 1e-12 * cmax) continue;
    kept.points.push_back(lambda[j]);
    d.push_back((*coeffs)[j]);
  }

  WitnessReport rep;
  auto finish = [&](WitnessReport r) {
    if (kept.size() < lambda.size()) r.log({{"step", "dropped zero coefficients"}, {"kept", kept.size()}});
    if (!r.refuted() && !r.certificate && opts.attach_certificate) {
      r.certificate = cert ? *cert : gram_certificate(f, lambda, opts);
      if (r.certificate->dependent) r.verdict = Verdict::NumericallyDependent;
    }
    return r;
  };

  if (kept.size() == 1) {
    rep.branch = "single_term";
    Relation one{f, kept, d};
    auto [t, rr] = detail::residual_scan(one, opts.window_start - 32, opts.window_start + 32, 4096);
    (void)rr;
    detail::conclude(rep, one, one, t, one.residual(t));
    return finish(rep);
  }
  Relation rel{f, kept, d};
  if (f.half_line_left_edge() && f.is_square_integrable()) return finish(detail::half_line_shortcut(rel));
  if (!f.is_ultimately_positive()) {
    rep.branch = "not_ultimately_positive";
    rep.log({{"step", "skipped"}, {"reason", "sign arguments need an ultimately positive f"}});
    return finish(rep);
  }
  if (kept.size() == 4) return finish(verify_4pt(f, kept, d, opts));

  bool all_equal = true;
  for (std::size_t j = 1; j < kept.size(); ++j) all_equal &= same_omega(kept, 0, j);
  if (all_equal) {
    rep.branch = "line";
    Relation frame = reorigin(rel, normalize_origin(f, kept).origin_index);
    detail::case4_in_frame(rep, rel, frame, opts);
    return finish(rep);
  }
  try {
    return finish(verify_theorem_1_4(f, kept, d, opts));
  } catch (const PreconditionNotMet& e) {
    rep.branch = "gram_certificate";
    rep.log({{"step", "precondition not met"}, {"reason", e.what()}});
    return finish(rep);
  }
}

}  // namespace tfr
