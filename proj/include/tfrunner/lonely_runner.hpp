#pragma once

// Shifted lonely runners, trigonometric sign windows and the three-spectator
// analysis for velocities proportional to 1:2:3.

#include "tfrunner/torus_approx.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tfr {

class ScanFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Interval {
  double lo;
  double hi;

  double length() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool operator==(const Interval&) const = default;
};

struct RunnerInstance {
  std::vector<double> velocities;
  std::vector<double> starts;
  std::optional<ExactFrequencies> exact;

  std::size_t n() const { return velocities.size(); }

  double max_velocity() const { return *std::max_element(velocities.begin(), velocities.end()); }

  void validate() const {
    if (velocities.empty()) throw std::invalid_argument("runner instance needs at least one runner");
    if (starts.size() != velocities.size()) throw std::invalid_argument("velocities and starts differ in length");
    if (exact && exact->values.size() != velocities.size())
      throw std::invalid_argument("exact velocities and velocities differ in length");
    for (std::size_t j = 0; j < velocities.size(); ++j) {
      if (!std::isfinite(velocities[j]) || velocities[j] <= 0)
        throw std::invalid_argument("velocities must be positive and finite");
      if (!std::isfinite(starts[j])) throw std::invalid_argument("non-finite start");
      for (std::size_t k = 0; k < j; ++k)
        if (velocities[k] == velocities[j]) throw std::invalid_argument("velocities must be pairwise distinct");
    }
  }
};

/// min_j ||s_j + t v_j||.
inline double runner_margin(const RunnerInstance& inst, double t) {
  double m = 0.5;
  for (std::size_t j = 0; j < inst.n(); ++j) m = std::min(m, torus_norm(inst.starts[j] + t * inst.velocities[j]));
  return m;
}

/// Distance of every runner from a spectator at position q on [0, 1).
inline double spectator_margin(const RunnerInstance& inst, double q, double t) {
  double m = 0.5;
  for (std::size_t j = 0; j < inst.n(); ++j)
    m = std::min(m, torus_norm(inst.starts[j] + t * inst.velocities[j] - q));
  return m;
}

struct LonelyTime {
  double t;
  double margin;
};

namespace detail {

// Local maxima of t -> runner_margin(inst, t) lie at tent peaks of a single
// runner or where two runners are equally far from the spectator.
inline std::vector<double> margin_breakpoints(const RunnerInstance& inst, double a, double b) {
  std::vector<double> out;
  auto add_family = [&](double w, double c, double offset) {
    // t = (m + offset - c) / w for integer m, t in [a, b)
    if (w == 0) return;
    const double p0 = w * a + c - offset, p1 = w * b + c - offset;
    const auto m0 = static_cast<std::int64_t>(std::floor(std::min(p0, p1)));
    const auto m1 = static_cast<std::int64_t>(std::ceil(std::max(p0, p1)));
    for (std::int64_t m = m0; m <= m1; ++m) {
      const double t = (static_cast<double>(m) + offset - c) / w;
      if (t >= a && t < b) out.push_back(t);
    }
  };
  const auto& v = inst.velocities;
  const auto& s = inst.starts;
  for (std::size_t j = 0; j < inst.n(); ++j) {
    add_family(v[j], s[j], 0.5);
    for (std::size_t k = j + 1; k < inst.n(); ++k) {
      add_family(v[j] - v[k], s[j] - s[k], 0.0);
      add_family(v[j] + v[k], s[j] + s[k], 0.0);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

/// First t >= window_start (on the scan resolution) with runner_margin >= target.
/// The scan walks a grid of step 1 / (8 v_max n) in doubling rounds and also
/// tests every breakpoint of the margin function inside each round, so
/// isolated maxima such as the 1:2:3 configuration are not missed. `budget`
/// counts grid points; nullopt is inconclusive.
inline std::optional<LonelyTime> find_lonely_time(const RunnerInstance& inst, double target, double window_start = 0.0,
                                                  std::int64_t budget = std::int64_t{1} << 30) {
  inst.validate();
  if (!(target > 0 && target <= 0.5)) throw std::invalid_argument("target must lie in (0, 1/2]");
  if (budget < 1) throw std::invalid_argument("budget must be positive");

  const double vmax = inst.max_velocity();
  const double step = 1.0 / (8.0 * vmax * static_cast<double>(inst.n()));
  auto probe = [&](double t) {
    const double m = runner_margin(inst, t);
    return m >= target ? 0.0 : (target - m) / vmax;
  };

  std::int64_t lo = 0;
  std::int64_t round = scan::kFirstRound;
  while (lo < budget) {
    const std::int64_t hi = std::min(budget, lo + round);
    const double a = window_start + static_cast<double>(lo) * step;
    const double b = window_start + static_cast<double>(hi) * step;
    std::optional<double> best;
    if (auto hit = scan::first_hit({a, step, hi - lo}, probe)) best = hit->t;
    for (double t : detail::margin_breakpoints(inst, a, best ? *best : b)) {
      if (runner_margin(inst, t) >= target) {
        best = t;
        break;
      }
    }
    if (best) return LonelyTime{*best, runner_margin(inst, *best)};
    lo = hi;
    round *= 2;
  }
  return std::nullopt;
}

/// (t, margin) samples on [t0, t1] for plotting.
inline std::vector<LonelyTime> margin_samples(const RunnerInstance& inst, double t0, double t1, std::size_t count) {
  inst.validate();
  if (count < 2 || !(t1 > t0)) throw std::invalid_argument("need t1 > t0 and at least two samples");
  std::vector<LonelyTime> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(count - 1);
    out.push_back({t, runner_margin(inst, t)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sign windows of products of trigonometric factors.

enum class Trig { Cos, Sin };
enum class Sign { NonPositive, Negative, Positive };

struct SignFactor {
  double omega;
  double theta;
  Trig trig;
  Sign sign;
};

namespace detail {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Arc [A, B] of phases phi (mod 1) on which trig(2 pi phi) meets the sign
// condition with margin `slack`. B < A means the arc is empty.
inline Interval phase_arc(Trig trig, Sign sign, double slack) {
  if (trig == Trig::Cos) {
    if (sign == Sign::Positive) {
      const double b = std::acos(slack) / kTwoPi;
      return {-b, b};
    }
    const double a = std::acos(-slack) / kTwoPi;
    return {a, 1.0 - a};
  }
  const double c = std::asin(slack) / kTwoPi;
  if (sign == Sign::Positive) return {c, 0.5 - c};
  return {0.5 + c, 1.0 - c};
}

inline bool sign_holds(const SignFactor& f, double t, double slack) {
  const double phase = kTwoPi * (f.omega * t + f.theta);
  const double v = f.trig == Trig::Cos ? std::cos(phase) : std::sin(phase);
  return f.sign == Sign::Positive ? v >= slack && v > 0 : v <= -slack && (f.sign == Sign::NonPositive || v < 0);
}

inline std::vector<Interval> factor_intervals(const SignFactor& f, double a, double b, double slack) {
  if (f.omega == 0) {
    if (sign_holds(f, a, slack)) return {{a, b}};
    return {};
  }
  const Interval arc = phase_arc(f.trig, f.sign, slack);
  if (!(arc.hi > arc.lo)) return {};
  const double p0 = f.omega * a + f.theta, p1 = f.omega * b + f.theta;
  const auto m0 = static_cast<std::int64_t>(std::floor(std::min(p0, p1) - arc.hi));
  const auto m1 = static_cast<std::int64_t>(std::ceil(std::max(p0, p1) - arc.lo));
  std::vector<Interval> out;
  for (std::int64_t m = m0; m <= m1; ++m) {
    double lo = (arc.lo + static_cast<double>(m) - f.theta) / f.omega;
    double hi = (arc.hi + static_cast<double>(m) - f.theta) / f.omega;
    if (lo > hi) std::swap(lo, hi);
    lo = std::max(lo, a);
    hi = std::min(hi, b);
    if (hi > lo) out.push_back({lo, hi});
  }
  std::sort(out.begin(), out.end(), [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
  return out;
}

inline std::vector<Interval> intersect(const std::vector<Interval>& x, const std::vector<Interval>& y) {
  std::vector<Interval> out;
  std::size_t i = 0, j = 0;
  while (i < x.size() && j < y.size()) {
    const double lo = std::max(x[i].lo, y[j].lo);
    const double hi = std::min(x[i].hi, y[j].hi);
    if (hi > lo) out.push_back({lo, hi});
    if (x[i].hi < y[j].hi)
      ++i;
    else
      ++j;
  }
  return out;
}

}  // namespace detail

/// Maximal subintervals of [start, start + span] on which every factor meets
/// its sign condition with margin >= slack.
inline std::vector<Interval> sign_window(const std::vector<SignFactor>& factors, double start, double span,
                                         double slack = 0.0) {
  if (factors.empty()) throw std::invalid_argument("sign_window needs at least one factor");
  if (!(span > 0) || !std::isfinite(start)) throw std::invalid_argument("invalid sign window range");
  if (!(slack >= 0 && slack < 1)) throw std::invalid_argument("slack must lie in [0, 1)");
  for (const auto& f : factors)
    if (!std::isfinite(f.omega) || !std::isfinite(f.theta)) throw std::invalid_argument("non-finite factor");
  const double end = start + span;
  std::vector<Interval> acc{{start, end}};
  for (const auto& f : factors) {
    acc = detail::intersect(acc, detail::factor_intervals(f, start, end, slack));
    if (acc.empty()) break;
  }
  return acc;
}

inline std::vector<Interval> sign_window(const std::vector<double>& omegas, const std::vector<double>& thetas, Trig trig,
                                         Sign sign, double start, double span, double slack = 0.0) {
  if (omegas.size() != thetas.size()) throw std::invalid_argument("frequencies and phases differ in length");
  std::vector<SignFactor> factors;
  for (std::size_t k = 0; k < omegas.size(); ++k) factors.push_back({omegas[k], thetas[k], trig, sign});
  return sign_window(factors, start, span, slack);
}

/// Earliest sign window starting at or after `start`, searching spans that
/// double from 1 up to `max_span`.
inline std::optional<Interval> first_sign_window(const std::vector<SignFactor>& factors, double start,
                                                 double slack = 0.0, double max_span = 4096.0) {
  for (double span = 1.0; span <= max_span; span *= 2) {
    auto w = sign_window(factors, start, span, slack);
    if (!w.empty()) return w.front();
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Three spectators for velocities c * (1, 2, 3).

enum class Spectator { One, I, MinusI };

inline double spectator_position(Spectator k) {
  switch (k) {
    case Spectator::One: return 0.0;
    case Spectator::I: return 0.25;
    case Spectator::MinusI: return 0.75;
  }
  return 0.0;
}

inline std::string to_string(Spectator k) {
  switch (k) {
    case Spectator::One: return "one";
    case Spectator::I: return "i";
    case Spectator::MinusI: return "minus_i";
  }
  return "?";
}

struct SpectatorVerdict {
  Spectator spectator;
  Interval witness_interval;
  double margin;  // min distance at the interval midpoint minus 1/4
};

inline bool velocities_proportional_123(const RunnerInstance& inst) {
  if (inst.n() != 3) return false;
  if (inst.exact) {
    const auto& e = *inst.exact;
    return is_proportional_123(e.basis, e.values[0], e.values[1], e.values[2]);
  }
  return is_proportional_123(inst.velocities[0], inst.velocities[1], inst.velocities[2]);
}

/// Open intervals of t in [window_start, window_start + 2 / v1) on which all
/// three runners stay farther than 1/4 from spectator k.
inline std::vector<Interval> spectator_intervals(const RunnerInstance& inst, Spectator k, double window_start = 0.0) {
  const double c = inst.velocities[0];
  const double q = spectator_position(k);
  std::vector<SignFactor> factors;
  for (std::size_t j = 0; j < 3; ++j)
    factors.push_back({static_cast<double>(j + 1), inst.starts[j] - q, Trig::Cos, Sign::Negative});
  auto rescaled = sign_window(factors, c * window_start, 2.0);
  for (auto& w : rescaled) w = {w.lo / c, w.hi / c};
  return rescaled;
}

inline SpectatorVerdict select_spectator(const RunnerInstance& inst, double window_start = 0.0) {
  inst.validate();
  if (inst.n() != 3) throw std::invalid_argument("select_spectator needs three runners");
  if (!velocities_proportional_123(inst)) throw std::invalid_argument("velocities are not proportional to 1:2:3");
  std::optional<SpectatorVerdict> best;
  for (Spectator k : {Spectator::One, Spectator::I, Spectator::MinusI}) {
    for (const auto& w : spectator_intervals(inst, k, window_start)) {
      if (best && !(w.length() > best->witness_interval.length() * (1 + 1e-12))) continue;
      const double m = spectator_margin(inst, spectator_position(k), w.mid()) - 0.25;
      if (m > 0) best = SpectatorVerdict{k, w, m};
    }
  }
  if (!best) throw ScanFailure("no spectator interval found for a 1:2:3 configuration");
  return *best;
}

}  // namespace tfr
