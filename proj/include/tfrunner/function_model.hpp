#pragma once

// Window functions f used to generate Gabor systems. Every model is a plain
// value; `shift` translates the whole model so that T_tau f is again a model.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

namespace tfr {

/// exp(-(t - center)^2 / (2 width^2)).
struct Gaussian {
  double center = 0.0;
  double width = 1.0;
};

enum class LeftTail { Zero, Ramp };

/// exp(-rate (t - t0)) for t >= t0. Left of t0 the model is either zero or
/// the positive ramp exp(rate (t - t0)).
struct OneSidedExpDecay {
  double t0 = 0.0;
  double rate = 1.0;
  LeftTail left_tail = LeftTail::Ramp;
};

/// 2 + cos(2 pi t).
struct TwoPlusCos {};

enum class HalfLineProfile { Exponential, Gaussian };

/// Supported on [t0, inf): exp(-(t - t0) / scale) or exp(-(t - t0)^2 / (2 scale^2)).
struct HalfLine {
  double t0 = 0.0;
  HalfLineProfile profile = HalfLineProfile::Exponential;
  double scale = 1.0;
};

/// K * C0^t.
struct ExpPure {
  double K = 1.0;
  double C0 = 0.5;
};

/// Piecewise-linear interpolation of (grid, values); zero outside the grid.
struct Tabulated {
  std::vector<double> grid;
  std::vector<double> values;
};

class FunctionModel {
 public:
  using Kind = std::variant<Gaussian, OneSidedExpDecay, TwoPlusCos, HalfLine, ExpPure, Tabulated>;

  FunctionModel() : FunctionModel(Gaussian{}) {}
  FunctionModel(Kind kind, double shift = 0.0) : kind_(std::move(kind)), shift_(shift) { validate(); }

  const Kind& kind() const { return kind_; }
  double shift() const { return shift_; }

  std::string kind_name() const {
    return std::visit(
        [](const auto& k) -> std::string {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Gaussian>) return "gaussian";
          if constexpr (std::is_same_v<K, OneSidedExpDecay>) return "one_sided_exp_decay";
          if constexpr (std::is_same_v<K, TwoPlusCos>) return "two_plus_cos";
          if constexpr (std::is_same_v<K, HalfLine>) return "half_line";
          if constexpr (std::is_same_v<K, ExpPure>) return "exp_pure";
          if constexpr (std::is_same_v<K, Tabulated>) return "tabulated";
        },
        kind_);
  }

  /// T_tau f.
  FunctionModel shifted(double tau) const { return FunctionModel(kind_, shift_ + tau); }

  double operator()(double t) const {
    const double u = t - shift_;
    return std::visit([u](const auto& k) { return eval(k, u); }, kind_);
  }

  bool is_square_integrable() const {
    return !std::holds_alternative<TwoPlusCos>(kind_) && !std::holds_alternative<ExpPure>(kind_);
  }

  /// Some t0 with f(t) > 0 for every t >= t0; -inf when f is positive
  /// everywhere and nullopt when f is not ultimately positive.
  std::optional<double> positivity_onset() const {
    constexpr double everywhere = -std::numeric_limits<double>::infinity();
    auto onset = std::visit(
        [&](const auto& k) -> std::optional<double> {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Gaussian> || std::is_same_v<K, TwoPlusCos>) return everywhere;
          if constexpr (std::is_same_v<K, OneSidedExpDecay>)
            return k.left_tail == LeftTail::Ramp ? everywhere : k.t0;
          if constexpr (std::is_same_v<K, HalfLine>) return k.t0;
          if constexpr (std::is_same_v<K, ExpPure>) return k.K > 0 ? std::optional<double>(everywhere) : std::nullopt;
          if constexpr (std::is_same_v<K, Tabulated>) return std::nullopt;
        },
        kind_);
    if (onset && std::isfinite(*onset)) *onset += shift_;
    return onset;
  }

  bool is_ultimately_positive() const { return positivity_onset().has_value(); }

  /// Left edge of the support when f vanishes on a left half-line.
  std::optional<double> half_line_left_edge() const {
    auto edge = std::visit(
        [](const auto& k) -> std::optional<double> {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, HalfLine>) return k.t0;
          if constexpr (std::is_same_v<K, OneSidedExpDecay>)
            return k.left_tail == LeftTail::Zero ? std::optional<double>(k.t0) : std::nullopt;
          if constexpr (std::is_same_v<K, Tabulated>) return k.grid.front();
          return std::nullopt;
        },
        kind_);
    if (edge) *edge += shift_;
    return edge;
  }

 private:
  static double eval(const Gaussian& g, double u) {
    const double z = (u - g.center) / g.width;
    return std::exp(-0.5 * z * z);
  }
  static double eval(const OneSidedExpDecay& e, double u) {
    const double z = u - e.t0;
    if (z >= 0) return std::exp(-e.rate * z);
    return e.left_tail == LeftTail::Ramp ? std::exp(e.rate * z) : 0.0;
  }
  static double eval(const TwoPlusCos&, double u) { return 2.0 + std::cos(2.0 * std::numbers::pi * u); }
  static double eval(const HalfLine& h, double u) {
    const double z = u - h.t0;
    if (z < 0) return 0.0;
    if (h.profile == HalfLineProfile::Exponential) return std::exp(-z / h.scale);
    const double r = z / h.scale;
    return std::exp(-0.5 * r * r);
  }
  static double eval(const ExpPure& e, double u) { return e.K * std::pow(e.C0, u); }
  static double eval(const Tabulated& tab, double u) {
    const auto& x = tab.grid;
    if (u < x.front() || u > x.back()) return 0.0;
    auto it = std::upper_bound(x.begin(), x.end(), u);
    if (it == x.end()) return tab.values.back();
    const auto i = static_cast<std::size_t>(it - x.begin());
    const double w = (u - x[i - 1]) / (x[i] - x[i - 1]);
    return (1 - w) * tab.values[i - 1] + w * tab.values[i];
  }

  void validate() const {
    if (!std::isfinite(shift_)) throw std::invalid_argument("non-finite shift");
    std::visit(
        [](const auto& k) {
          using K = std::decay_t<decltype(k)>;
          auto need = [](bool ok, const char* what) {
            if (!ok) throw std::invalid_argument(what);
          };
          if constexpr (std::is_same_v<K, Gaussian>)
            need(std::isfinite(k.center) && k.width > 0 && std::isfinite(k.width), "gaussian width must be positive");
          if constexpr (std::is_same_v<K, OneSidedExpDecay>)
            need(std::isfinite(k.t0) && k.rate > 0 && std::isfinite(k.rate), "decay rate must be positive");
          if constexpr (std::is_same_v<K, HalfLine>)
            need(std::isfinite(k.t0) && k.scale > 0 && std::isfinite(k.scale), "half-line scale must be positive");
          if constexpr (std::is_same_v<K, ExpPure>)
            need(std::isfinite(k.K) && k.C0 > 0 && std::isfinite(k.C0), "exp_pure base must be positive");
          if constexpr (std::is_same_v<K, Tabulated>) {
            need(k.grid.size() >= 2 && k.grid.size() == k.values.size(), "tabulated model needs matching grid/values");
            for (std::size_t i = 1; i < k.grid.size(); ++i)
              need(k.grid[i] > k.grid[i - 1], "tabulated grid must be strictly increasing");
          }
        },
        kind_);
  }

  Kind kind_;
  double shift_ = 0.0;
};

}  // namespace tfr
