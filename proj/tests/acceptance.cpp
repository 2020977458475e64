// Acceptance criteria: one PASS/FAIL line per criterion on standard output.
// Exit status is the number of failed criteria.

#include "oracles.hpp"
#include "tfrunner/hrt_verifier.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace tfr;

namespace {

const double kPi = std::numbers::pi;

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("AC%-2d %s  %s  [%s] (%.2f s)\n", id, o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), secs);
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <class... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Complex random_coeff(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mag(0.2, 2.0), ph(0.0, 1.0);
  return std::polar(mag(rng), 2 * kPi * ph(rng));
}

/// The relation sum recomputed from scratch.
double residual(const FunctionModel& f, const PointSet& ps, const std::vector<Complex>& d, double t) {
  Complex s = 0;
  for (std::size_t j = 0; j < ps.size(); ++j) s += d[j] * std::exp(Complex(0, 2 * kPi * ps[j].omega * t)) * f(t - ps[j].tau);
  return std::abs(s);
}

bool reverified(const FunctionModel& f, const PointSet& ps, const std::vector<Complex>& d, const WitnessReport& r) {
  return r.refuted() && r.witness_time && r.margin > 0 && residual(f, ps, d, *r.witness_time) > r.margin / 2;
}

const RealBasis kSurds({"1", "sqrt2", "sqrt3"}, {1.0, std::sqrt(2.0), std::sqrt(3.0)});
ExactReal surd(Rational a, Rational b = 0, Rational c = 0) { return ExactReal({a, b, c}); }

PointSet exact_points(const std::vector<double>& taus, const std::vector<ExactReal>& omegas) {
  PointSet ps{{}, kSurds};
  for (std::size_t i = 0; i < taus.size(); ++i) ps.points.push_back({taus[i], omegas[i].to_double(kSurds), omegas[i]});
  return ps;
}

RunnerInstance random_rational_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> num(1, 60), den(1, 6);
  std::uniform_real_distribution<double> start(0.0, 1.0);
  RunnerInstance inst;
  ExactFrequencies ex{RealBasis(), {}};
  std::vector<Rational> qs;
  while (qs.size() < 3) {
    Rational q(num(rng), den(rng));
    if (std::find(qs.begin(), qs.end(), q) == qs.end()) qs.push_back(q);
  }
  std::sort(qs.begin(), qs.end());
  for (const auto& q : qs) {
    inst.velocities.push_back(to_double(q));
    inst.starts.push_back(start(rng));
    ex.values.push_back(ExactReal::rational(q, 1));
  }
  inst.exact = ex;
  return inst;
}

}  // namespace

int main() {
  // 1. Extremal anchor: sup of the 1:2:3 margin over one period.
  criterion(1, "1:2:3 margin supremum is 1/4", [] {
    const auto t0 = std::chrono::steady_clock::now();
    RunnerInstance inst{{1, 2, 3}, {0, 0, 0}, std::nullopt};
    double best = 0, arg = 0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / n;
      const double m = runner_margin(inst, t);
      if (m > best) best = m, arg = t;
    }
    const double secs = elapsed_since(t0);
    return Outcome{std::abs(best - 0.25) <= 1e-6 && secs < 5.0,
                   fmt("sup %.9f at t=%.6f, |sup-1/4| tol 1e-6, %.2f s < 5 s", best, arg, secs)};
  });

  // 2. Shifted three-runner suite on rational velocities.
  criterion(2, "shifted lonely runner n=3, 1000 rational instances", [] {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(2024);
    int sharp = 0, above = 0, above_total = 0;
    std::ostringstream misses;
    for (int i = 0; i < 1000; ++i) {
      auto inst = random_rational_instance(rng);
      auto hit = find_lonely_time(inst, 0.25 - 1e-9, 0.0, std::int64_t{1} << 26);
      if (hit && runner_margin(inst, hit->t) >= 0.25 - 1e-9) ++sharp;
      if (!velocities_proportional_123(inst)) {
        ++above_total;
        auto h2 = find_lonely_time(inst, 0.25 + 1e-3, 0.0, std::int64_t{1} << 26);
        if (h2 && runner_margin(inst, h2->t) >= 0.25 + 1e-3)
          ++above;
        else
          misses << " v=(" << inst.velocities[0] << "," << inst.velocities[1] << "," << inst.velocities[2] << ")";
      }
    }
    const double secs = elapsed_since(t0);
    if (!misses.str().empty()) std::printf("     AC2 instances without a 1/4+1e-3 witness:%s\n", misses.str().c_str());
    const bool ok = sharp == 1000 && above >= 0.99 * above_total && secs < 60;
    return Outcome{ok, fmt("target 1/4-1e-9: %d/1000 (need 100%%); target 1/4+1e-3: %d/%d (need >= 99%%); %.1f s < 60 s",
                           sharp, above, above_total, secs)};
  });

  // 3. Three spectators for 1:2:3 velocities.
  criterion(3, "spectator selection on 1000 random starts", [] {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int verified = 0;
    auto check = [](const RunnerInstance& inst, const SpectatorVerdict& v) {
      if (!(v.witness_interval.length() > 0)) return false;
      const double q = spectator_position(v.spectator);
      for (double t : {v.witness_interval.mid(), v.witness_interval.lo + 0.25 * v.witness_interval.length(),
                       v.witness_interval.lo + 0.75 * v.witness_interval.length()}) {
        for (std::size_t j = 0; j < 3; ++j)
          if (!(oracle::frac_dist(inst.starts[j] + t * inst.velocities[j] - q) > 0.25)) return false;
      }
      return true;
    };
    for (int i = 0; i < 1000; ++i) {
      RunnerInstance inst{{1, 2, 3}, {u(rng), u(rng), u(rng)}, std::nullopt};
      if (check(inst, select_spectator(inst))) ++verified;
    }
    RunnerInstance zero{{1, 2, 3}, {0, 0, 0}, std::nullopt};
    const auto z = select_spectator(zero);
    const bool zero_ok = z.spectator != Spectator::One && check(zero, z);
    return Outcome{verified == 1000 && zero_ok,
                   fmt("verified %d/1000; s=0 selects '%s' (must not be 'one')", verified, to_string(z.spectator).c_str())};
  });

  // 4. Good sequences are approximable, bad ones provably are not.
  criterion(4, "good/bad sequence equivalence, 500 planted relations", [] {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> small(-2, 2), coef(1, 2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int good_ok = 0, good_total = 0, bad_ok = 0, bad_total = 0;
    for (int i = 0; i < 500; ++i) {
      ExactReal l1 = surd(small(rng), coef(rng), 0), l2 = surd(small(rng), 0, coef(rng));
      const int p1 = small(rng), p2 = coef(rng);
      ExactReal l3 = surd(0);
      for (int k = 0; k < std::abs(p1); ++k) l3 = p1 > 0 ? l3 + l1 : l3 - l1;
      for (int k = 0; k < p2; ++k) l3 = l3 + l2;
      if (l3.is_zero()) l3 = l3 + l1;
      ExactFrequencies ex{kSurds, {l1, l2, l3}};
      const double x1 = u(rng), x2 = u(rng);
      // Consistent targets satisfy the planted relation; the others miss it.
      const double consistent = [&] {
        std::vector<ExactReal> v{l1, l2, l3};
        auto lat = relation_lattice(v);
        const auto& p = lat.basis.front();
        return -(static_cast<double>(p[0]) * x1 + static_cast<double>(p[1]) * x2) / static_cast<double>(p[2]);
      }();
      if (i % 2 == 0) {
        for (double eps : {0.05, 0.01}) {
          ++good_total;
          auto task = ApproxTask::from_exact(ex, {x1, x2, consistent}, eps);
          auto w = kronecker_witness(task);
          if (w && approximation_error(task.lambdas, task.targets, w->t) <= eps) ++good_ok;
        }
      } else {
        ++bad_total;
        auto task = ApproxTask::from_exact(ex, {x1, x2, consistent + 0.1 + 0.3 * u(rng)}, 0.05);
        auto verdict = classify_sequence(task);
        if (verdict.good()) continue;
        std::int64_t S = 0;
        for (auto v : *verdict.violating_relation) S += std::abs(v);
        const double eps = 0.9 * *verdict.defect / static_cast<double>(S);
        task.epsilon = std::min(eps, 0.5);
        bool blocked = false;
        try {
          kronecker_witness(task);
        } catch (const BadSequence&) {
          blocked = true;
        }
        // Independent check on a grid: no sampled time reaches the tolerance.
        double min_err = 1.0;
        for (int k = 0; k < 20000; ++k) min_err = std::min(min_err, approximation_error(task.lambdas, task.targets, k * 0.0173));
        if (blocked && *verdict.defect > static_cast<double>(S) * task.epsilon && min_err > task.epsilon) ++bad_ok;
      }
    }
    const double secs = elapsed_since(t0);
    return Outcome{good_ok == good_total && bad_ok == bad_total,
                   fmt("good: %d/%d witnesses within eps in {0.05, 0.01}; bad: %d/%d blocked with defect > sum|p| eps; %.1f s",
                       good_ok, good_total, bad_ok, bad_total, secs)};
  });

  // 5. The 2 + cos(2 pi x) counterexample.
  criterion(5, "2+cos(2 pi x) six-point system is dependent", [] {
    bool ok = true;
    std::ostringstream d;
    for (double a : {0.3, 1 / std::sqrt(2.0), 2.7}) {
      const auto t0 = std::chrono::steady_clock::now();
      auto ps = make_points({{0, 0}, {0, -1}, {0, 1}, {a, 0}, {a, -1}, {a, 1}});
      auto s = independence_score(FunctionModel(TwoPlusCos{}), ps, 16.0, std::size_t{1} << 14);
      const double secs = elapsed_since(t0);
      const bool this_ok = s.min_eigenvalue <= 1e-8 * s.trace && s.residual <= 1e-6 && secs < 10;
      ok &= this_ok;
      d << fmt("a=%.4f: min/trace %.2e (<=1e-8), residual %.2e (<=1e-6), %.2f s; ", a, s.relative_min(), s.residual, secs);
    }
    return Outcome{ok, d.str()};
  });

  // 6. Gaussian independence certificates.
  criterion(6, "Gaussian 4-point systems are numerically independent", [] {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const FunctionModel g{Gaussian{0.0, 0.5}};
    int ok = 0;
    double worst = 1;
    for (int i = 0; i < 200; ++i) {
      PointSet ps;
      while (ps.size() < 4) {
        TFPoint p{u(rng), u(rng), std::nullopt};
        bool far = true;
        for (const auto& q : ps.points) far &= std::hypot(p.tau - q.tau, p.omega - q.omega) >= 0.1;
        if (far) ps.points.push_back(p);
      }
      auto s = independence_score(g, ps);
      worst = std::min(worst, s.relative_min());
      if (s.min_eigenvalue >= 1e-6 * s.trace) ++ok;
    }
    return Outcome{ok == 200, fmt("%d/200 with min eigenvalue >= 1e-6 trace; worst ratio %.3e", ok, worst)};
  });

  // 7. Refutation pipeline on Cases 1-3.
  criterion(7, "verify_4pt refutes random Case 1/2/3 relations", [] {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> tau(-1.5, 1.5), w(0.2, 3.0);
    std::uniform_int_distribution<int> pick(0, 5);
    const FunctionModel f{OneSidedExpDecay{}};
    int refuted = 0, inconclusive = 0, dependent = 0, bad_refutation = 0;
    int cases[4] = {0, 0, 0, 0};
    for (int i = 0; i < 200; ++i) {
      std::vector<double> om;
      const double a = w(rng), b = w(rng), c = w(rng);
      switch (pick(rng)) {
        case 0: om = {0, a, a + b, a + b + c}; break;          // Case 1, generic
        case 1: om = {0, a, 2 * a, 3 * a}; break;              // Case 1, extremal
        case 2: om = {0, 0, a, a + b}; break;                  // Case 2, bottom pair
        case 3: om = {0, a, a, a + b}; break;                  // Case 2, middle pair
        case 4: om = {0, a, a + b, a + b}; break;              // Case 2, top pair
        default: om = {0, 0, 0, a}; break;                     // Case 3
      }
      PointSet ps;
      for (double o : om) ps.points.push_back({tau(rng), o, std::nullopt});
      std::vector<Complex> d;
      for (int k = 0; k < 4; ++k) d.push_back(random_coeff(rng));
      auto r = verify_4pt(f, ps, d);
      ++cases[static_cast<int>(r.case_tag->tag)];
      if (r.refuted()) {
        if (reverified(f, ps, d, r))
          ++refuted;
        else
          ++bad_refutation;
      } else if (r.verdict == Verdict::Inconclusive) {
        ++inconclusive;
      } else {
        ++dependent;
      }
    }
    const double secs = elapsed_since(t0);
    const bool ok = refuted >= 190 && dependent == 0 && bad_refutation == 0 && secs < 120;
    return Outcome{ok, fmt("refuted+reverified %d/200 (need >= 190), inconclusive %d, dependent %d (need 0), "
                           "unverified %d; cases 1/2/3 = %d/%d/%d; %.1f s < 120 s",
                           refuted, inconclusive, dependent, bad_refutation, cases[0], cases[1], cases[2], secs)};
  });

  // 8. High affine dimension branches.
  criterion(8, "high affine dimension worked examples", [] {
    const FunctionModel f{OneSidedExpDecay{}};
    std::mt19937_64 rng(8);
    struct Example {
      const char* branch;
      std::vector<ExactReal> omegas;
    };
    const std::vector<Example> examples{
        {"theorem_1_4.independent", {surd(0), surd(1), surd(0, 1), surd(0, 0, 1)}},
        {"theorem_1_4.perturbation", {surd(0), surd(1), surd(0, 1), surd(1, 1)}},
        {"theorem_1_4.reduction", {surd(0), surd(0), surd(0, 1), surd(0, 0, 1)}},
    };
    bool ok = true;
    std::ostringstream d;
    for (const auto& ex : examples) {
      auto ps = exact_points({0, 0.7, -0.6, 1.1}, ex.omegas);
      std::vector<Complex> c{Complex(1)};
      for (int k = 0; k < 3; ++k) c.push_back(random_coeff(rng));
      auto r = verify_theorem_1_4(f, ps, c);
      const bool this_ok = r.branch == ex.branch && reverified(f, ps, c, r);
      ok &= this_ok;
      d << r.branch << ":" << to_string(r.verdict) << "; ";
    }
    return Outcome{ok, d.str()};
  });

  // 9. Phase perturbations.
  criterion(9, "perturbation_phis postconditions, 1000 cases", [] {
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int> len(2, 6), entry(-5, 5);
    std::uniform_real_distribution<double> alpha(-20, 20);
    int ok = 0, n = 0;
    double worst_res = 0, worst_phi = 0;
    while (n < 1000) {
      IntVector p(static_cast<std::size_t>(len(rng)));
      for (auto& v : p) v = entry(rng);
      std::int64_t S = 0;
      for (auto v : p) S += std::abs(v);
      if (S < 3) continue;
      ++n;
      const double a = alpha(rng);
      auto r = perturbation_phis(p, a);
      long double z = a;
      double mx = 0;
      for (std::size_t k = 0; k < p.size(); ++k) z += static_cast<long double>(p[k]) * r.phis[k], mx = std::max(mx, std::abs(r.phis[k]));
      const double res = static_cast<double>(std::abs(z - std::nearbyint(z)));
      worst_res = std::max(worst_res, res);
      worst_phi = std::max(worst_phi, mx);
      if (mx < 0.25 && res <= 1e-12) ++ok;
    }
    return Outcome{ok == 1000, fmt("%d/1000; max|phi| %.4f (< 0.25), worst residual %.2e (<= 1e-12)", ok, worst_phi, worst_res)};
  });

  // 10. Case 5 arithmetic.
  criterion(10, "Case 5 feasibility examples and Birkhoff averages", [] {
    auto a = case5_feasibility(0.25, 0.5, 1.0, 2.0);
    auto b = case5_feasibility(0.5, 0.5, 1.0, 3.0);
    auto c = case5_feasibility(0.3, 0.3, 1.7, 1.7);
    const bool ex_ok = a.feasible && a.C0 && std::abs(*a.C0 - 0.5) <= 1e-12 && !b.feasible && c.feasible && c.C0 &&
                       std::abs(*c.C0 - std::pow(0.3, 1 / 1.7)) <= 1e-12;
    const double alpha = std::sqrt(2.0) - 1;
    auto k4 = khinchin_average_check(0.5, alpha, 1.0, 0.0, 10000);
    auto k6 = khinchin_average_check(0.5, alpha, 1.0, 0.0, 1000000);
    return Outcome{ex_ok && k6.deviation <= k4.deviation,
                   fmt("examples %s; deviation N=1e4 %.3e, N=1e6 %.3e", ex_ok ? "match" : "MISMATCH", k4.deviation,
                       k6.deviation)};
  });

  std::printf("%d criterion(s) failed\n", failures);
  return failures;
}
