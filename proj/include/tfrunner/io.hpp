#pragma once

// JSON encodings of the library's inputs and reports.

#include "tfrunner/hrt_verifier.hpp"
#include "tfrunner/lonely_runner.hpp"
#include "tfrunner/torus_approx.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace tfr::io {

using json = nlohmann::json;

class ParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("'" + path + "': " + e.what());
  }
}

namespace detail {

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
  return j.at(key);
}

inline double number(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number()) throw ParseError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

inline double number_or(const json& j, const char* key, double fallback) {
  return j.contains(key) ? number(j, key) : fallback;
}

inline Integer integer(const json& v) {
  if (v.is_number_integer()) return Integer(v.get<std::int64_t>());
  if (v.is_string()) return numerator(parse_rational(v.get<std::string>()));
  throw ParseError("rational parts must be integers or integer strings");
}

inline json integer_json(const Integer& z) {
  if (z >= std::numeric_limits<std::int64_t>::min() && z <= std::numeric_limits<std::int64_t>::max())
    return z.convert_to<std::int64_t>();
  return z.str();
}

}  // namespace detail

inline Rational rational_from_json(const json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (j.is_array() && j.size() == 2) {
    const Integer den = detail::integer(j[1]);
    if (den == 0) throw ParseError("zero denominator");
    return Rational(detail::integer(j[0]), den);
  }
  throw ParseError("rational must be [num, den], an integer or a \"p/q\" string");
}

inline json to_json(const Rational& q) {
  return json::array({detail::integer_json(numerator(q)), detail::integer_json(denominator(q))});
}

/// {"labels": ["1", "sqrt2"], "values": [1.0, 1.4142135623730951]}
inline RealBasis basis_from_json(const json& j) {
  const json& labels = detail::field(j, "labels");
  const json& values = detail::field(j, "values");
  try {
    return RealBasis(labels.get<std::vector<std::string>>(), values.get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw ParseError(std::string("basis: ") + e.what());
  }
}

inline json to_json(const RealBasis& b) { return {{"labels", b.labels()}, {"values", b.values()}}; }

/// {"basis": [labels], "coeffs": [[num, den], ...]}
inline ExactReal exact_from_json(const json& j, const RealBasis& basis) {
  const auto labels = detail::field(j, "basis").get<std::vector<std::string>>();
  if (labels != basis.labels()) throw ParseError("exact value uses a different basis");
  std::vector<Rational> c;
  for (const auto& q : detail::field(j, "coeffs")) c.push_back(rational_from_json(q));
  if (c.size() != basis.size()) throw ParseError("exact value has the wrong number of coefficients");
  return ExactReal(std::move(c));
}

inline json to_json(const ExactReal& x, const RealBasis& basis) {
  json coeffs = json::array();
  for (const auto& q : x.coeffs()) coeffs.push_back(to_json(q));
  return {{"basis", basis.labels()}, {"coeffs", coeffs}};
}

/// {"basis": {...}, "values": [exact, ...]}
inline ExactFrequencies exact_values_from_json(const json& j) {
  const RealBasis basis = basis_from_json(detail::field(j, "basis"));
  ExactFrequencies out{basis, {}};
  for (const auto& v : detail::field(j, "values")) out.values.push_back(exact_from_json(v, basis));
  if (out.values.empty()) throw ParseError("'values' must not be empty");
  return out;
}

inline json to_json(const ExactFrequencies& x) {
  json values = json::array();
  for (const auto& v : x.values) values.push_back(to_json(v, x.basis));
  return {{"basis", to_json(x.basis)}, {"values", values}};
}

/// {"points": [{"tau": t, "omega": w, "omega_exact": {...}}], "basis": {...}}
/// The basis may also come from a separate file.
inline PointSet points_from_json(const json& j, std::optional<RealBasis> basis = std::nullopt) {
  if (j.is_object() && j.contains("basis")) basis = basis_from_json(j.at("basis"));
  PointSet ps{{}, std::nullopt};
  const json& pts = detail::field(j, "points");
  if (!pts.is_array()) throw ParseError("'points' must be an array");
  bool all_exact = !pts.empty();
  for (const auto& p : pts) {
    TFPoint q{detail::number(p, "tau"), 0.0, std::nullopt};
    if (p.contains("omega_exact")) {
      if (!basis) throw ParseError("exact frequencies need a basis");
      q.omega_exact = exact_from_json(p.at("omega_exact"), *basis);
      q.omega = q.omega_exact->to_double(*basis);
    } else {
      q.omega = detail::number(p, "omega");
      all_exact = false;
    }
    ps.points.push_back(std::move(q));
  }
  if (basis && all_exact) ps.basis = basis;
  try {
    ps.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
  return ps;
}

inline json to_json(const PointSet& ps) {
  json pts = json::array();
  for (const auto& p : ps.points) {
    json q = {{"tau", p.tau}, {"omega", p.omega}};
    if (p.omega_exact && ps.basis) q["omega_exact"] = to_json(*p.omega_exact, *ps.basis);
    pts.push_back(q);
  }
  json out = {{"points", pts}};
  if (ps.basis) out["basis"] = to_json(*ps.basis);
  return out;
}

/// Tagged by "kind"; an optional "shift" translates the model.
inline FunctionModel function_from_json(const json& j) {
  const std::string kind = detail::field(j, "kind").get<std::string>();
  const double shift = detail::number_or(j, "shift", 0.0);
  auto tail = [&](const char* key, auto fallback, auto parse) { return j.contains(key) ? parse(j.at(key)) : fallback; };
  try {
    if (kind == "gaussian") return {Gaussian{detail::number_or(j, "center", 0), detail::number_or(j, "width", 1)}, shift};
    if (kind == "one_sided_exp_decay") {
      auto lt = tail("left_tail", LeftTail::Ramp, [](const json& v) {
        const auto s = v.get<std::string>();
        if (s == "ramp") return LeftTail::Ramp;
        if (s == "zero") return LeftTail::Zero;
        throw ParseError("left_tail must be \"ramp\" or \"zero\"");
      });
      return {OneSidedExpDecay{detail::number_or(j, "t0", 0), detail::number_or(j, "rate", 1), lt}, shift};
    }
    if (kind == "two_plus_cos") return {TwoPlusCos{}, shift};
    if (kind == "half_line") {
      auto prof = tail("profile", HalfLineProfile::Exponential, [](const json& v) {
        const auto s = v.get<std::string>();
        if (s == "exponential") return HalfLineProfile::Exponential;
        if (s == "gaussian") return HalfLineProfile::Gaussian;
        throw ParseError("profile must be \"exponential\" or \"gaussian\"");
      });
      return {HalfLine{detail::number_or(j, "t0", 0), prof, detail::number_or(j, "scale", 1)}, shift};
    }
    if (kind == "exp_pure") return {ExpPure{detail::number_or(j, "K", 1), detail::number_or(j, "C0", 0.5)}, shift};
    if (kind == "tabulated")
      return {Tabulated{detail::field(j, "grid").get<std::vector<double>>(),
                        detail::field(j, "values").get<std::vector<double>>()},
              shift};
  } catch (const json::exception& e) {
    throw ParseError(std::string("function: ") + e.what());
  } catch (const ParseError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("function: ") + e.what());
  }
  throw ParseError("unknown function kind '" + kind + "'");
}

inline json to_json(const FunctionModel& f) {
  json out = std::visit(
      [](const auto& k) -> json {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Gaussian>) return {{"center", k.center}, {"width", k.width}};
        if constexpr (std::is_same_v<K, OneSidedExpDecay>)
          return {{"t0", k.t0}, {"rate", k.rate}, {"left_tail", k.left_tail == LeftTail::Ramp ? "ramp" : "zero"}};
        if constexpr (std::is_same_v<K, TwoPlusCos>) return json::object();
        if constexpr (std::is_same_v<K, HalfLine>)
          return {{"t0", k.t0},
                  {"profile", k.profile == HalfLineProfile::Exponential ? "exponential" : "gaussian"},
                  {"scale", k.scale}};
        if constexpr (std::is_same_v<K, ExpPure>) return {{"K", k.K}, {"C0", k.C0}};
        if constexpr (std::is_same_v<K, Tabulated>) return {{"grid", k.grid}, {"values", k.values}};
      },
      f.kind());
  out["kind"] = f.kind_name();
  out["shift"] = f.shift();
  return out;
}

/// {"coefficients": [[re, im], ...]}
inline std::vector<Complex> coefficients_from_json(const json& j) {
  std::vector<Complex> out;
  for (const auto& z : detail::field(j, "coefficients")) {
    if (z.is_number()) {
      out.emplace_back(z.get<double>(), 0.0);
    } else if (z.is_array() && z.size() == 2 && z[0].is_number() && z[1].is_number()) {
      out.emplace_back(z[0].get<double>(), z[1].get<double>());
    } else {
      throw ParseError("coefficients must be numbers or [re, im] pairs");
    }
  }
  return out;
}

inline json to_json(const std::vector<Complex>& c) {
  json arr = json::array();
  for (const auto& z : c) arr.push_back({z.real(), z.imag()});
  return {{"coefficients", arr}};
}

// ---------------------------------------------------------------------------
// Reports.

inline json optional_number(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

inline json to_json(const SequenceVerdict& v) {
  json out = {{"verdict", v.good() ? "Good" : "Bad"}, {"heuristic", v.heuristic}, {"relations", v.relations}};
  if (v.violating_relation) out["violating_relation"] = *v.violating_relation;
  if (v.defect) out["defect"] = *v.defect;
  return out;
}

inline json to_json(const ApproxWitness& w) {
  return {{"t", w.t}, {"achieved_error", w.achieved_error}, {"grid_index", w.grid_index}};
}

inline json to_json(const Interval& iv) { return {{"lo", iv.lo}, {"hi", iv.hi}, {"length", iv.length()}}; }

inline json to_json(const LonelyTime& lt) { return {{"t", lt.t}, {"margin", lt.margin}}; }

inline json to_json(const SpectatorVerdict& v) {
  return {{"spectator", to_string(v.spectator)}, {"witness_interval", to_json(v.witness_interval)}, {"margin", v.margin}};
}

inline json to_json(const IndependenceScore& s) {
  json eig = json::array();
  for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) eig.push_back(s.eigenvalues(i));
  std::vector<Complex> v;
  for (Eigen::Index i = 0; i < s.min_vector.size(); ++i) v.push_back(s.min_vector(i));
  json out = {{"min_eigenvalue", s.min_eigenvalue},
              {"trace", s.trace},
              {"relative_min", s.relative_min()},
              {"eigenvalues", eig},
              {"dependent", s.dependent()},
              {"residual", s.residual},
              {"min_vector", to_json(v)["coefficients"]}};
  out["null_vector"] = s.dependent() ? out["min_vector"] : json(nullptr);
  return out;
}

inline json to_json(const GramCertificate& g) {
  return {{"min_eigenvalue", g.min_eigenvalue},
          {"trace", g.trace},
          {"relative_min", g.relative_min},
          {"dependent", g.dependent},
          {"residual", g.residual},
          {"window", g.window},
          {"samples", g.samples},
          {"min_vector", to_json(g.min_vector)["coefficients"]}};
}

inline json to_json(const CaseTag& c) {
  json out = {{"tag", to_string(c.tag)}};
  out["subcase"] = c.subcase == Subcase::None ? json(nullptr) : json(to_string(c.subcase));
  return out;
}

inline json to_json(const WitnessReport& r) {
  json out = {{"branch", r.branch},
              {"verdict", to_string(r.verdict)},
              {"witness_time", optional_number(r.witness_time)},
              {"margin", r.margin},
              {"heuristic", r.heuristic},
              {"details", r.details}};
  out["case"] = r.case_tag ? to_json(*r.case_tag) : json(nullptr);
  out["certificate"] = r.certificate ? to_json(*r.certificate) : json(nullptr);
  return out;
}

}  // namespace tfr::io
